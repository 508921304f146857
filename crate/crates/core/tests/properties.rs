use proptest::prelude::*;

use pairsig_core::calibration::{calibrate_skewness, calibrate_tails};
use pairsig_core::distributions::{ibb_support, DistributionSpec, Family, Metric, Shape};
use pairsig_core::paired::{
    t_test, wilcoxon_test, Alternative, PairedSample, SignedRankNull, Wilcoxon, WilcoxonOptions,
    ZeroPolicy,
};
use pairsig_core::rng::RandomStream;

fn differences() -> impl Strategy<Value = Vec<f64>> {
    // Coarse values so that ties and zeros show up regularly.
    prop::collection::vec((-40i32..=40).prop_map(|v| v as f64 / 8.0), 2..80)
}

fn options() -> impl Strategy<Value = WilcoxonOptions> {
    (prop::bool::ANY, 0usize..60, prop::bool::ANY).prop_map(|(pratt, threshold, cc)| {
        WilcoxonOptions {
            zero_policy: if pratt {
                ZeroPolicy::Pratt
            } else {
                ZeroPolicy::Drop
            },
            exact_threshold: threshold,
            continuity_correction: cc,
        }
    })
}

fn alternatives() -> impl Strategy<Value = Alternative> {
    prop_oneof![
        Just(Alternative::TwoSided),
        Just(Alternative::Greater),
        Just(Alternative::Less)
    ]
}

fn swapped(a: Alternative) -> Alternative {
    match a {
        Alternative::TwoSided => Alternative::TwoSided,
        Alternative::Greater => Alternative::Less,
        Alternative::Less => Alternative::Greater,
    }
}

proptest! {
    #[test]
    fn wilcoxon_is_antisymmetric(values in differences(), opts in options(), alt in alternatives()) {
        let s = PairedSample::new(values).unwrap();
        let a = wilcoxon_test(&s, &opts, alt);
        let b = wilcoxon_test(&s.negated(), &opts, swapped(alt));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
                prop_assert_eq!(a.statistic, b.companion.unwrap());
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn t_test_is_antisymmetric(values in differences(), alt in alternatives()) {
        let s = PairedSample::new(values).unwrap();
        match (t_test(&s, alt), t_test(&s.negated(), swapped(alt))) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.statistic, -b.statistic);
                prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn tests_are_scale_invariant(values in differences(), e in -20i32..20, alt in alternatives()) {
        let c = 2f64.powi(e);
        let s = PairedSample::new(values).unwrap();
        let scaled = s.scaled(c);
        if let (Ok(a), Ok(b)) = (t_test(&s, alt), t_test(&scaled, alt)) {
            prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
        }
        let opts = WilcoxonOptions::default();
        if let (Ok(a), Ok(b)) = (wilcoxon_test(&s, &opts, alt), wilcoxon_test(&scaled, &opts, alt)) {
            prop_assert_eq!(a.p_value, b.p_value);
        }
    }

    #[test]
    fn fast_path_agrees_with_full_test(values in differences(), opts in options(), alt in alternatives()) {
        let w = Wilcoxon::with_exact_tables(opts, &[values.len()]);
        let mut scratch = Vec::new();
        let full = w.test(&PairedSample::new(values.clone()).unwrap(), alt);
        let fast = w.p_value_with(&values, alt, &mut scratch);
        match (full, fast) {
            (Ok(r), Ok(p)) => prop_assert_eq!(r.p_value, p),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn exact_tails_are_monotone(n in 1usize..=60) {
        let null = SignedRankNull::new(n).unwrap();
        let mut prev_upper = 1.0;
        let mut prev_lower = 0.0;
        for w in 0..=null.max_statistic() as i64 {
            let (u, l) = (null.upper_tail(w), null.lower_tail(w));
            prop_assert!(u <= prev_upper && l >= prev_lower);
            prop_assert_eq!(u, null.lower_tail(null.max_statistic() as i64 - w));
            prev_upper = u;
            prev_lower = l;
        }
    }

    #[test]
    fn pairing_is_antisymmetric(pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..60)) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let a = PairedSample::from_scores(&x, &y).unwrap();
        let b = PairedSample::from_scores(&y, &x).unwrap();
        prop_assert_eq!(a, b.negated());
    }

    #[test]
    fn reflection_negates_odd_moments(gamma in 0.05f64..5.0, tgh in prop::bool::ANY) {
        let family = if tgh { Family::Tgh } else { Family::Agn };
        let spec = calibrate_skewness(family, gamma).unwrap();
        let m = spec.theoretical_moments().unwrap();
        let r = spec.reflected().theoretical_moments().unwrap();
        prop_assert!((m.mean + r.mean).abs() < 1e-12);
        prop_assert!((m.sd - r.sd).abs() < 1e-12);
        prop_assert!((m.skewness + r.skewness).abs() < 1e-9);
        prop_assert!((m.excess_kurtosis - r.excess_kurtosis).abs() < 1e-9);
    }

    #[test]
    fn calibration_round_trips(gamma in 0.0f64..5.0, kappa in -1.2f64..30.0, heavy in 0.0f64..30.0) {
        for family in [Family::Agn, Family::Tgh] {
            let m = calibrate_skewness(family, gamma).unwrap().theoretical_moments().unwrap();
            prop_assert!((m.skewness - gamma).abs() < 1e-6);
            prop_assert!((m.sd - 0.22).abs() < 1e-12 && m.mean.abs() < 1e-12);
        }
        let m = calibrate_tails(Family::Sgn, kappa).unwrap().theoretical_moments().unwrap();
        prop_assert!((m.excess_kurtosis - kappa).abs() < 1e-6);
        let m = calibrate_tails(Family::Tgh, heavy).unwrap().theoretical_moments().unwrap();
        prop_assert!((m.excess_kurtosis - heavy).abs() < 1e-6);
    }

    #[test]
    fn ibb_draws_stay_on_the_support(k in 1u32..200, rr in prop::bool::ANY, p in 0.05f64..50.0, seed in any::<u64>()) {
        let metric = if rr { Metric::ReciprocalRankAtK } else { Metric::PrecisionAtK };
        let support = ibb_support(metric, k).unwrap();
        let spec = DistributionSpec::unit(Shape::Ibb { support: support.clone(), p }).unwrap();
        for x in spec.sample(200, RandomStream::new(seed)).unwrap() {
            prop_assert!(support.values().contains(&x), "{x} not in support");
        }
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), cell in any::<u64>(), rep in any::<u64>(), beta in 0.3f64..10.0) {
        let spec = DistributionSpec::new(Shape::Sgn { beta }, 0.1, 0.22).unwrap();
        let stream = RandomStream::new(seed).cell(cell).replicate(rep);
        let a = spec.sample(64, stream).unwrap();
        prop_assert_eq!(&a, &spec.sample(64, stream).unwrap());
        prop_assert_eq!(&a[..16], &spec.sample(16, stream).unwrap()[..]);
        prop_assert_ne!(a, spec.sample(64, stream.replicate(rep.wrapping_add(1))).unwrap());
    }
}
