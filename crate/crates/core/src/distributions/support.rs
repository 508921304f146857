//! Attainable score-difference supports of cutoff metrics and the symmetric
//! beta-binomial index distribution defined over them.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Cutoff metric whose per-topic score differences define a discrete support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Metric {
    PrecisionAtK,
    ReciprocalRankAtK,
}

impl Metric {
    pub fn short_name(self) -> &'static str {
        match self {
            Metric::PrecisionAtK => "p",
            Metric::ReciprocalRankAtK => "rr",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p" | "p@k" | "precision" | "precision_at_k" => Some(Metric::PrecisionAtK),
            "rr" | "rr@k" | "reciprocal_rank" | "reciprocal_rank_at_k" => {
                Some(Metric::ReciprocalRankAtK)
            }
            _ => None,
        }
    }
}

impl core::fmt::Display for Metric {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Metric::PrecisionAtK => write!(f, "P@k"),
            Metric::ReciprocalRankAtK => write!(f, "RR@k"),
        }
    }
}

/// Sorted, deduplicated set of attainable differences between two metric
/// scores, each rounded to three decimals.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricSupport {
    pub metric: Metric,
    pub k: u32,
    values: Vec<f64>,
}

// Rounds num/den to the nearest integer, halves away from zero.
fn round_half_away(num: i64, den: i64) -> i64 {
    debug_assert!(den > 0);
    let q = (2 * num.abs() + den) / (2 * den);
    if num < 0 {
        -q
    } else {
        q
    }
}

/// Attainable score differences for `metric` at cutoff `k`.
pub fn ibb_support(metric: Metric, k: u32) -> Result<MetricSupport> {
    if k == 0 {
        return Err(Error::ParameterDomain(format!(
            "metric cutoff k must be >= 1"
        )));
    }
    // Scores as exact rationals (numerator, denominator).
    let scores: Vec<(i64, i64)> = match metric {
        Metric::PrecisionAtK => (0..=k as i64).map(|i| (i, k as i64)).collect(),
        Metric::ReciprocalRankAtK => core::iter::once((0, 1))
            .chain((1..=k as i64).map(|r| (1, r)))
            .collect(),
    };
    let mut millis = BTreeSet::new();
    for &(a, b) in &scores {
        for &(c, d) in &scores {
            let num = 1000 * (a * d - c * b);
            millis.insert(round_half_away(num, b * d));
        }
    }
    let values = millis.into_iter().map(|m| m as f64 / 1000.0).collect();
    Ok(MetricSupport { metric, k, values })
}

impl MetricSupport {
    /// Builds a support from explicit values, checking the invariants.
    pub fn from_values(metric: Metric, k: u32, mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        values.dedup();
        let support = MetricSupport { metric, k, values };
        support.validate()?;
        Ok(support)
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

    pub fn validate(&self) -> Result<()> {
        let v = &self.values;
        if v.len() < 2 {
            return Err(Error::ParameterDomain(format!(
                "support needs at least 2 values, got {}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ParameterDomain(format!(
                "support values must be finite, sorted and distinct"
            )));
        }
        let n = v.len();
        if (0..n).any(|i| v[i] != -v[n - 1 - i]) {
            return Err(Error::ParameterDomain(format!(
                "support must be symmetric about zero"
            )));
        }
        Ok(())
    }
}

/// Probability mass function of BetaBin(n, p, p) over 0..=n.
///
/// Evaluated with the pmf ratio recurrence outwards from the centre and
/// mirrored, so the result is exactly symmetric and does not underflow at
/// the mode for large `n` or `p`.
pub fn symmetric_beta_binomial_pmf(n: usize, p: f64) -> Result<Vec<f64>> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "p must be finite and > 0, got {p}"
        )));
    }
    let nf = n as f64;
    let centre = n / 2;
    let mut w = alloc::vec![0.0f64; n + 1];
    w[centre] = 1.0;
    for j in (1..=centre).rev() {
        let jf = j as f64;
        w[j - 1] = w[j] * jf * (nf - jf + p) / ((nf - jf + 1.0) * (jf - 1.0 + p));
    }
    for j in 0..=centre {
        w[n - j] = w[j];
    }
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}

/// Mean, variance and excess kurtosis of `support[J]` with `J ~ BetaBin(|Ω|-1, p, p)`.
pub(crate) fn ibb_pmf_moments(support: &MetricSupport, p: f64) -> Result<(Vec<f64>, f64, f64)> {
    support.validate()?;
    let pmf = symmetric_beta_binomial_pmf(support.len() - 1, p)?;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for (w, v) in pmf.iter().zip(support.values()) {
        let v2 = v * v;
        m2 += w * v2;
        m4 += w * v2 * v2;
    }
    Ok((pmf, m2, m4 / (m2 * m2) - 3.0))
}

/// Standard deviation of the irregular beta-binomial from its exact pmf.
pub fn ibb_sd(support: &MetricSupport, p: f64) -> Result<f64> {
    let (_, variance, _) = ibb_pmf_moments(support, p)?;
    Ok(libm::sqrt(variance))
}
