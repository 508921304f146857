//! Paired significance tests on per-topic differences `D_i = X_i - Y_i`.

mod ttest;
mod wilcoxon;

use alloc::vec::Vec;

pub use ttest::{t_statistic, t_test, z_statistic, z_test};
pub(crate) use ttest::{t_statistic_slice, t_test_slice};
pub use wilcoxon::{
    signed_ranks, w_plus, wilcoxon_exact_tail, wilcoxon_normal_approx, wilcoxon_test,
    SignedRankNull, SignedRanks, Wilcoxon, WilcoxonOptions, ZeroPolicy, MAX_EXACT_N,
};

use crate::{Error, Result};

/// Finite per-topic differences.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairedSample {
    values: Vec<f64>,
}

impl PairedSample {
    /// Wraps the differences, rejecting empty input and non-finite values.
    ///
    /// Tests that need a variance estimate require at least two values and
    /// check that themselves.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooFewObservations {
                required: 1,
                actual: 0,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values })
    }

    /// Differences `x_i - y_i` of two equally long score vectors.
    pub fn from_scores(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::ParameterDomain(alloc::format!(
                "score vectors differ in length ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        Self::new(x.iter().zip(y).map(|(a, b)| a - b).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Alternative {
    #[default]
    TwoSided,
    /// `μ_D > 0`.
    Greater,
    /// `μ_D < 0`.
    Less,
}

/// Which null distribution produced a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    #[cfg_attr(feature = "serde", serde(rename = "t"))]
    T,
    #[cfg_attr(feature = "serde", serde(rename = "z"))]
    Z,
    #[cfg_attr(feature = "serde", serde(rename = "wilcoxon-exact"))]
    WilcoxonExact,
    #[cfg_attr(feature = "serde", serde(rename = "wilcoxon-normal-approx"))]
    WilcoxonNormalApprox,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::T => "t",
            Method::Z => "z",
            Method::WilcoxonExact => "wilcoxon-exact",
            Method::WilcoxonNormalApprox => "wilcoxon-normal-approx",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestResult {
    /// t, z or W+.
    pub statistic: f64,
    /// W- for the signed-rank test.
    pub companion: Option<f64>,
    pub p_value: f64,
    pub method: Method,
    pub dropped_zeros: usize,
    /// Sizes of groups of tied absolute differences (only groups of 2+).
    pub tie_groups: Vec<usize>,
    pub alternative: Alternative,
    /// Degrees of freedom (t) or effective number of ranked differences.
    pub df_or_n: f64,
}

impl TestResult {
    /// Rejection decision at level `alpha` (`p < alpha`).
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

pub(crate) fn two_sided_from_tails(lower: f64, upper: f64) -> f64 {
    (2.0 * lower.min(upper)).min(1.0)
}
