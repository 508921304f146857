//! Empirical moments of each sampler against the theoretical ones, with
//! delta-method standard errors estimated from the draws.

use pairsig_core::calibration::{calibrate_ibb, IbbRangePolicy, SIGMA_D};
use pairsig_core::distributions::{ibb_support, DistributionSpec, Metric, Shape};
use pairsig_core::rng::RandomStream;

struct Estimates {
    mean: (f64, f64),
    sd: (f64, f64),
    skewness: (f64, f64),
    kurtosis: (f64, f64),
}

/// (estimate, standard error) pairs.
fn estimates(x: &[f64]) -> Estimates {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m = |k: i32| x.iter().map(|v| (v - mean).powi(k)).sum::<f64>() / n;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    let sd = m2.sqrt();
    let g = m3 / sd.powi(3);
    let k = m4 / (m2 * m2);
    let se = |f: &dyn Fn(f64) -> f64| {
        let vals: Vec<f64> = x.iter().map(|v| f((v - mean) / sd)).collect();
        let mu = vals.iter().sum::<f64>() / n;
        (vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n / n).sqrt()
    };
    Estimates {
        mean: (mean, sd / n.sqrt()),
        sd: (sd, sd * se(&|z| (z * z - 1.0) / 2.0)),
        skewness: (g, se(&|z| z.powi(3) - 3.0 * z - 1.5 * g * (z * z - 1.0))),
        kurtosis: (
            k - 3.0,
            se(&|z| z.powi(4) - 4.0 * g * z - 2.0 * k * (z * z - 1.0)),
        ),
    }
}

fn check(spec: &DistributionSpec, seed: u64) {
    let theory = spec.theoretical_moments().unwrap();
    let draws = spec.sample(200_000, RandomStream::new(seed)).unwrap();
    let e = estimates(&draws);
    for (name, (est, se), target) in [
        ("mean", e.mean, theory.mean),
        ("sd", e.sd, theory.sd),
        ("skewness", e.skewness, theory.skewness),
        ("excess kurtosis", e.kurtosis, theory.excess_kurtosis),
    ] {
        assert!(
            (est - target).abs() <= 5.0 * se,
            "{spec:?} {name}: {est} vs {target} (se {se})"
        );
    }
}

#[test]
fn continuous_families() {
    let specs = [
        DistributionSpec::new(Shape::Normal, 0.3, 2.0).unwrap(),
        DistributionSpec::new(Shape::Sgn { beta: 1.0 }, 0.0, 0.22).unwrap(),
        DistributionSpec::new(Shape::Sgn { beta: 4.5 }, -1.0, 1.0).unwrap(),
        DistributionSpec::new(
            Shape::Sgn {
                beta: f64::INFINITY,
            },
            0.0,
            1.0,
        )
        .unwrap(),
        DistributionSpec::new(Shape::Agn { xi: 1.7, nu: 2.0 }, 0.0, 1.0).unwrap(),
        DistributionSpec::new(Shape::Agn { xi: 3.0, nu: 1.3 }, 0.5, 0.5).unwrap(),
        DistributionSpec::new(Shape::Tgh { g: 0.4, h: 0.0 }, 0.0, 1.0).unwrap(),
        DistributionSpec::new(Shape::Tgh { g: 0.0, h: 0.08 }, 0.0, 0.22).unwrap(),
        DistributionSpec::new(Shape::BimodalMixture { separation: 2.0 }, 0.0, 0.22).unwrap(),
    ];
    for (i, spec) in specs.iter().enumerate() {
        check(spec, 1000 + i as u64);
        check(&spec.reflected(), 2000 + i as u64);
    }
}

#[test]
fn ibb_regimes() {
    for (metric, k) in [
        (Metric::PrecisionAtK, 100),
        (Metric::ReciprocalRankAtK, 10),
        (Metric::ReciprocalRankAtK, 5),
    ] {
        let support = ibb_support(metric, k).unwrap();
        let spec = calibrate_ibb(&support, SIGMA_D, IbbRangePolicy::Error).unwrap();
        check(&spec, u64::from(k));
    }
}
