use alloc::vec::Vec;

use super::{Alternative, Method, PairedSample, TestResult};
use crate::special::{normal_cdf, normal_sf, student_t_cdf, student_t_sf, student_t_two_sided};
use crate::{Error, Result};

fn require_two(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::TooFewObservations {
            required: 2,
            actual: n,
        })
    } else {
        Ok(())
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `mean(D) / (σ / √n)` with known `σ`.
pub fn z_statistic(sample: &PairedSample, sigma: f64) -> Result<f64> {
    require_two(sample.len())?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::ParameterDomain(alloc::format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let n = sample.len() as f64;
    Ok(mean(sample.values()) / (sigma / libm::sqrt(n)))
}

/// z-test with known `σ`, p-value from the standard normal.
pub fn z_test(sample: &PairedSample, sigma: f64, alternative: Alternative) -> Result<TestResult> {
    let z = z_statistic(sample, sigma)?;
    let p_value = match alternative {
        Alternative::TwoSided => (2.0 * normal_sf(z.abs())).min(1.0),
        Alternative::Greater => normal_sf(z),
        Alternative::Less => normal_cdf(z),
    };
    Ok(TestResult {
        statistic: z,
        companion: None,
        p_value,
        method: Method::Z,
        dropped_zeros: 0,
        tie_groups: Vec::new(),
        alternative,
        df_or_n: sample.len() as f64,
    })
}

pub(crate) fn t_statistic_slice(values: &[f64]) -> Result<(f64, usize)> {
    let n = values.len();
    require_two(n)?;
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Err(Error::DegenerateSample(
            "all differences are equal; s_D = 0",
        ));
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    let sd = libm::sqrt(ss / (n - 1) as f64);
    Ok((m / (sd / libm::sqrt(n as f64)), n - 1))
}

/// `t = mean(D) / (s_D / √n)` and its `n - 1` degrees of freedom.
pub fn t_statistic(sample: &PairedSample) -> Result<(f64, usize)> {
    t_statistic_slice(sample.values())
}

pub(crate) fn t_test_slice(values: &[f64], alternative: Alternative) -> Result<TestResult> {
    let (t, df) = t_statistic_slice(values)?;
    let dff = df as f64;
    let p_value = match alternative {
        Alternative::TwoSided => student_t_two_sided(t, dff),
        Alternative::Greater => student_t_sf(t, dff),
        Alternative::Less => student_t_cdf(t, dff),
    };
    Ok(TestResult {
        statistic: t,
        companion: None,
        p_value,
        method: Method::T,
        dropped_zeros: 0,
        tie_groups: Vec::new(),
        alternative,
        df_or_n: dff,
    })
}

/// Paired Student t-test.
pub fn t_test(sample: &PairedSample, alternative: Alternative) -> Result<TestResult> {
    t_test_slice(sample.values(), alternative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(v: &[f64]) -> PairedSample {
        PairedSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn t_statistic_worked_example() {
        // mean 0.175, s^2 = 0.8475 / 3 = 0.2825
        let (t, df) = t_statistic(&sample(&[-0.4, -0.1, 0.4, 0.8])).unwrap();
        let expected = 0.175 / (libm::sqrt(0.2825) / 2.0);
        assert_abs_diff_eq!(t, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(t, 0.6586, epsilon = 1e-4);
        assert_eq!(df, 3);
    }

    #[test]
    fn t_oddness_and_scale_invariance() {
        let s = sample(&[0.3, -0.12, 0.5, 0.02, 0.41]);
        let (t, _) = t_statistic(&s).unwrap();
        let (tn, _) = t_statistic(&s.negated()).unwrap();
        assert_eq!(t, -tn);
        let (ts, _) = t_statistic(&s.scaled(3.7)).unwrap();
        assert_abs_diff_eq!(t, ts, epsilon = 1e-13);
    }

    #[test]
    fn zero_variance_is_degenerate() {
        let s = sample(&[0.2, 0.2, 0.2, 0.2, 0.2]);
        assert!(matches!(
            t_test(&s, Alternative::TwoSided),
            Err(Error::DegenerateSample(_))
        ));
        let zeros = sample(&[0.0, 0.0, 0.0]);
        assert!(matches!(
            t_statistic(&zeros),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn z_statistic_cases() {
        assert_eq!(z_statistic(&sample(&[0.0, 0.0, 0.0]), 0.22).unwrap(), 0.0);
        assert!(matches!(
            z_statistic(&sample(&[0.22]), 0.22),
            Err(Error::TooFewObservations {
                required: 2,
                actual: 1
            })
        ));
        let s = sample(&[0.1, 0.3, -0.05, 0.2]);
        let a = z_statistic(&s, 0.22).unwrap();
        let b = z_statistic(&s.scaled(5.0), 0.22 * 5.0).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        assert!(z_statistic(&s, 0.0).is_err());
    }

    #[test]
    fn t_test_zero_statistic_gives_one() {
        let r = t_test(&sample(&[-1.0, 1.0, -2.0, 2.0]), Alternative::TwoSided).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn one_sided_p_values_split_the_two_sided_one() {
        let s = sample(&[0.3, -0.12, 0.5, 0.02, 0.41, 0.07]);
        let two = t_test(&s, Alternative::TwoSided).unwrap().p_value;
        let greater = t_test(&s, Alternative::Greater).unwrap().p_value;
        let less = t_test(&s, Alternative::Less).unwrap().p_value;
        assert_abs_diff_eq!(greater, two / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(greater + less, 1.0, epsilon = 1e-15);
        let neg = t_test(&s.negated(), Alternative::TwoSided).unwrap().p_value;
        assert_eq!(two, neg);
    }
}
