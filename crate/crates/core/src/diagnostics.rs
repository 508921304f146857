//! Moment diagnostics of observed differences and a combined test report.

use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::paired::{t_test, Alternative, PairedSample, TestResult, Wilcoxon, WilcoxonOptions};
use crate::rng::RandomStream;
use crate::{Error, Result};

/// Sample skewness and excess kurtosis from uncorrected central moments
/// (`g1 = m3 / m2^1.5`, `g2 = m4 / m2^2 - 3`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleMoments {
    pub n: usize,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub(crate) fn central_moments(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Sample skewness of a slice (`n >= 3`), `None` when the variance is zero.
pub fn sample_skewness(values: &[f64]) -> Option<f64> {
    if values.len() < 3 {
        return None;
    }
    let (m2, m3, _) = central_moments(values);
    if m2 > 0.0 {
        Some(m3 / libm::pow(m2, 1.5))
    } else {
        None
    }
}

/// Sample skewness and excess kurtosis; needs `n >= 4` and nonzero variance.
pub fn sample_moments(sample: &PairedSample) -> Result<SampleMoments> {
    let values = sample.values();
    if values.len() < 4 {
        return Err(Error::TooFewObservations {
            required: 4,
            actual: values.len(),
        });
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Err(Error::DegenerateSample("zero sample variance"));
    }
    let (m2, m3, m4) = central_moments(values);
    Ok(SampleMoments {
        n: values.len(),
        skewness: m3 / libm::pow(m2, 1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ResampleMode {
    Identity,
    /// Subsample without replacement.
    Down,
    /// Sample with replacement.
    Up,
}

impl ResampleMode {
    pub fn name(self) -> &'static str {
        match self {
            ResampleMode::Identity => "identity",
            ResampleMode::Down => "down",
            ResampleMode::Up => "up",
        }
    }
}

/// Resamples to `n_target` values: without replacement when shrinking, with
/// replacement when growing, unchanged when the sizes match.
pub fn resample_to_n(
    sample: &PairedSample,
    n_target: usize,
    stream: RandomStream,
) -> Result<(PairedSample, ResampleMode)> {
    let values = sample.values();
    let n = values.len();
    if n_target == n {
        return Ok((sample.clone(), ResampleMode::Identity));
    }
    let mut rng = stream.rng();
    let (out, mode): (Vec<f64>, _) = if n_target < n {
        let mut picked = index::sample(&mut rng, n, n_target).into_vec();
        picked.sort_unstable();
        (
            picked.into_iter().map(|i| values[i]).collect(),
            ResampleMode::Down,
        )
    } else {
        (
            (0..n_target)
                .map(|_| values[rng.random_range(0..n)])
                .collect(),
            ResampleMode::Up,
        )
    };
    Ok((PairedSample::new(out)?, mode))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagnoseOptions {
    pub asymmetry_threshold: f64,
    pub wilcoxon: WilcoxonOptions,
    pub alternative: Alternative,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            asymmetry_threshold: 0.5,
            wilcoxon: WilcoxonOptions::default(),
            alternative: Alternative::TwoSided,
        }
    }
}

pub const ASYMMETRY_CAUTION: &str = "the signed-rank test assumes differences symmetric about \
their center; under asymmetry its p-value reflects both location and shape";

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Diagnosis {
    pub moments: SampleMoments,
    pub t: TestResult,
    pub wilcoxon: TestResult,
    pub alpha: f64,
    pub asymmetry_flag: bool,
    pub caution: Option<&'static str>,
}

/// Both tests, the moment estimates and an asymmetry flag for one sample.
pub fn diagnose(sample: &PairedSample, alpha: f64, options: &DiagnoseOptions) -> Result<Diagnosis> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ParameterDomain(alloc::format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let moments = sample_moments(sample)?;
    let t = t_test(sample, options.alternative)?;
    let wilcoxon = Wilcoxon::new(options.wilcoxon).test(sample, options.alternative)?;
    let asymmetry_flag = moments.skewness.abs() > options.asymmetry_threshold;
    Ok(Diagnosis {
        moments,
        t,
        wilcoxon,
        alpha,
        asymmetry_flag,
        caution: asymmetry_flag.then_some(ASYMMETRY_CAUTION),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(v: &[f64]) -> PairedSample {
        PairedSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_data_has_zero_skewness() {
        let m = sample_moments(&sample(&[-1.0, -0.5, 0.5, 1.0])).unwrap();
        assert_eq!(m.skewness, 0.0);
    }

    #[test]
    fn two_point_kurtosis() {
        let m = sample_moments(&sample(&[-1.0, 1.0, -1.0, 1.0, -1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(m.excess_kurtosis, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn shift_invariance() {
        let a = sample(&[0.1, 0.5, -0.3, 0.9, 0.2]);
        let b = sample(&[10.1, 10.5, 9.7, 10.9, 10.2]);
        let (ma, mb) = (sample_moments(&a).unwrap(), sample_moments(&b).unwrap());
        assert_abs_diff_eq!(ma.skewness, mb.skewness, epsilon = 1e-9);
        assert_abs_diff_eq!(ma.excess_kurtosis, mb.excess_kurtosis, epsilon = 1e-9);
    }

    #[test]
    fn moment_errors() {
        assert!(matches!(
            sample_moments(&sample(&[1.0, 2.0, 3.0])),
            Err(Error::TooFewObservations { .. })
        ));
        assert!(matches!(
            sample_moments(&sample(&[0.0; 5])),
            Err(Error::DegenerateSample(_))
        ));
        assert!(diagnose(&sample(&[0.0; 5]), 0.05, &DiagnoseOptions::default()).is_err());
    }

    #[test]
    fn resampling_modes() {
        let s = sample(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let stream = RandomStream::new(3);
        let (same, mode) = resample_to_n(&s, 5, stream).unwrap();
        assert_eq!((same, mode), (s.clone(), ResampleMode::Identity));
        let (one, mode) = resample_to_n(&s, 1, stream).unwrap();
        assert_eq!(mode, ResampleMode::Down);
        assert!(s.values().contains(&one.values()[0]));
        let (down, _) = resample_to_n(&s, 3, stream).unwrap();
        let mut seen = down.values().to_vec();
        seen.dedup();
        assert_eq!(seen.len(), 3);
        let (up, mode) = resample_to_n(&s, 12, stream).unwrap();
        assert_eq!(mode, ResampleMode::Up);
        assert_eq!(up.len(), 12);
        assert!(up.values().iter().all(|v| s.values().contains(v)));
    }

    #[test]
    fn diagnosis_flag() {
        let skewed = sample(&[0.0, 0.01, 0.02, 0.03, 0.05, 0.04, 0.02, 0.9]);
        let d = diagnose(&skewed, 0.05, &DiagnoseOptions::default()).unwrap();
        assert!(d.asymmetry_flag);
        assert!(d.caution.is_some());
        let sym = sample(&[-0.3, -0.1, 0.1, 0.3, -0.2, 0.2]);
        let d = diagnose(&sym, 0.05, &DiagnoseOptions::default()).unwrap();
        assert!(!d.asymmetry_flag);
        assert_abs_diff_eq!(d.t.p_value, 1.0, epsilon = 1e-12);
    }
}
