//! Wilcoxon signed-rank test: midranks, exact null distribution by dynamic
//! programming, and the tie-corrected normal approximation.

use alloc::vec;
use alloc::vec::Vec;

use super::{two_sided_from_tails, Alternative, Method, PairedSample, TestResult};
use crate::special::{normal_cdf, normal_sf};
use crate::{Error, Result};

/// Largest `n` for which exact counts fit in `u128`.
pub const MAX_EXACT_N: usize = 126;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ZeroPolicy {
    /// Discard zero differences before ranking.
    #[default]
    Drop,
    /// Rank zeros together with the other differences, then discard their ranks.
    Pratt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WilcoxonOptions {
    pub zero_policy: ZeroPolicy,
    /// Largest effective sample size routed to the exact distribution.
    pub exact_threshold: usize,
    pub continuity_correction: bool,
}

impl Default for WilcoxonOptions {
    fn default() -> Self {
        Self {
            zero_policy: ZeroPolicy::Drop,
            exact_threshold: 50,
            continuity_correction: true,
        }
    }
}

/// Midranks of `|D_i|` for the differences that enter the statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedRanks {
    /// Ranks of the nonzero differences, in input order.
    pub ranks: Vec<f64>,
    /// Sign of each ranked difference (`true` for positive).
    pub positive: Vec<bool>,
    pub dropped_zeros: usize,
    /// Sizes of tied groups among everything that was ranked (groups of 2+).
    pub tie_groups: Vec<usize>,
    /// Total number of values that were ranked (includes zeros under Pratt).
    pub ranked: usize,
}

impl SignedRanks {
    pub fn w_plus(&self) -> f64 {
        self.ranks
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| p)
            .map(|(r, _)| r)
            .sum()
    }

    pub fn w_minus(&self) -> f64 {
        self.ranks
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| !p)
            .map(|(r, _)| r)
            .sum()
    }

    pub fn effective(&self) -> usize {
        self.ranks.len()
    }
}

pub(crate) fn signed_ranks_slice(values: &[f64], zero_policy: ZeroPolicy) -> Result<SignedRanks> {
    let zeros = values.iter().filter(|&&v| v == 0.0).count();
    if zeros == values.len() {
        return Err(Error::DegenerateSample("no nonzero differences to rank"));
    }
    // (|d|, original position or usize::MAX for a zero under Pratt)
    let mut keyed: Vec<(f64, usize)> = match zero_policy {
        ZeroPolicy::Drop => values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, v)| (v.abs(), i))
            .collect(),
        ZeroPolicy::Pratt => values
            .iter()
            .enumerate()
            .map(|(i, v)| (v.abs(), i))
            .collect(),
    };
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut rank_of = vec![0.0f64; values.len()];
    let mut tie_groups = Vec::new();
    let mut start = 0;
    while start < keyed.len() {
        let mut end = start + 1;
        while end < keyed.len() && keyed[end].0 == keyed[start].0 {
            end += 1;
        }
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &(_, i) in &keyed[start..end] {
            rank_of[i] = midrank;
        }
        if end - start > 1 {
            tie_groups.push(end - start);
        }
        start = end;
    }

    let mut ranks = Vec::with_capacity(values.len() - zeros);
    let mut positive = Vec::with_capacity(values.len() - zeros);
    for (i, &v) in values.iter().enumerate() {
        if v != 0.0 {
            ranks.push(rank_of[i]);
            positive.push(v > 0.0);
        }
    }
    Ok(SignedRanks {
        ranks,
        positive,
        dropped_zeros: zeros,
        tie_groups,
        ranked: keyed.len(),
    })
}

/// Midranks of the absolute differences after applying the zero policy.
pub fn signed_ranks(sample: &PairedSample, zero_policy: ZeroPolicy) -> Result<SignedRanks> {
    signed_ranks_slice(sample.values(), zero_policy)
}

/// Sum of the ranks of the positive differences.
pub fn w_plus(sample: &PairedSample, options: &WilcoxonOptions) -> Result<f64> {
    Ok(signed_ranks(sample, options.zero_policy)?.w_plus())
}

/// Exact null distribution of `W+` for `n` untied, nonzero differences:
/// all `2^n` sign assignments equally likely.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedRankNull {
    n: usize,
    /// `cumulative[w]` = number of sign patterns with `W+ <= w`.
    cumulative: Vec<u128>,
}

impl SignedRankNull {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_EXACT_N {
            return Err(Error::ExactTooLarge {
                n,
                max: MAX_EXACT_N,
            });
        }
        let max_w = n * (n + 1) / 2;
        let mut counts = vec![0u128; max_w + 1];
        counts[0] = 1;
        // Adding rank k either leaves W+ unchanged or raises it by k.
        for k in 1..=n {
            let top = k * (k + 1) / 2;
            for w in (k..=top).rev() {
                counts[w] += counts[w - k];
            }
        }
        let mut acc = 0u128;
        let cumulative = counts
            .into_iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect();
        Ok(Self { n, cumulative })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_statistic(&self) -> usize {
        self.cumulative.len() - 1
    }

    /// Number of sign patterns with `W+ = w`.
    pub fn count(&self, w: usize) -> u128 {
        match w {
            0 => self.cumulative[0],
            w if w < self.cumulative.len() => self.cumulative[w] - self.cumulative[w - 1],
            _ => 0,
        }
    }

    fn total(&self) -> f64 {
        libm::ldexp(1.0, self.n as i32)
    }

    /// Number of sign patterns with `W+ >= w`.
    pub fn upper_count(&self, w: i64) -> u128 {
        let all = self.cumulative[self.cumulative.len() - 1];
        if w <= 0 {
            all
        } else if w as usize > self.max_statistic() {
            0
        } else {
            all - self.cumulative[w as usize - 1]
        }
    }

    /// Number of sign patterns with `W+ <= w`.
    pub fn lower_count(&self, w: i64) -> u128 {
        if w < 0 {
            0
        } else {
            self.cumulative[(w as usize).min(self.max_statistic())]
        }
    }

    /// `P(W+ >= w)`.
    pub fn upper_tail(&self, w: i64) -> f64 {
        self.upper_count(w) as f64 / self.total()
    }

    /// `P(W+ <= w)`.
    pub fn lower_tail(&self, w: i64) -> f64 {
        self.lower_count(w) as f64 / self.total()
    }

    pub fn p_value(&self, w: i64, alternative: Alternative) -> f64 {
        match alternative {
            Alternative::TwoSided => two_sided_from_tails(self.lower_tail(w), self.upper_tail(w)),
            Alternative::Greater => self.upper_tail(w),
            Alternative::Less => self.lower_tail(w),
        }
    }
}

fn integral_statistic(w: f64) -> Result<i64> {
    if !w.is_finite() || libm::trunc(w) != w {
        Err(Error::TiesPresent(w))
    } else {
        Ok(w as i64)
    }
}

/// `P(W+ >= w)` under the exact null for `n` tie-free ranks.
pub fn wilcoxon_exact_tail(n: usize, w: f64) -> Result<f64> {
    let w = integral_statistic(w)?;
    Ok(SignedRankNull::new(n)?.upper_tail(w))
}

fn normal_p_value(
    w_plus: f64,
    mean: f64,
    variance: f64,
    continuity_correction: bool,
    alternative: Alternative,
) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(Error::DegenerateSample("signed-rank variance is zero"));
    }
    let sd = libm::sqrt(variance);
    let diff = w_plus - mean;
    let cc = if continuity_correction { 0.5 } else { 0.0 };
    let p = match alternative {
        Alternative::TwoSided => {
            let correction = if diff > 0.0 {
                cc
            } else if diff < 0.0 {
                -cc
            } else {
                0.0
            };
            let z = (diff - correction) / sd;
            two_sided_from_tails(normal_cdf(z), normal_sf(z))
        }
        Alternative::Greater => normal_sf((diff - cc) / sd),
        Alternative::Less => normal_cdf((diff + cc) / sd),
    };
    Ok(p)
}

fn tie_cubes(tie_groups: &[usize]) -> f64 {
    tie_groups
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum()
}

/// Large-sample normal approximation for `m = n_eff` ranked differences:
/// mean `m(m+1)/4`, variance `m(m+1)(2m+1)/24 - Σ(t³-t)/48`.
pub fn wilcoxon_normal_approx(
    w_plus: f64,
    n_eff: usize,
    tie_groups: &[usize],
    continuity_correction: bool,
    alternative: Alternative,
) -> Result<f64> {
    if n_eff == 0 {
        return Err(Error::DegenerateSample("no ranked differences"));
    }
    let m = n_eff as f64;
    let mean = m * (m + 1.0) / 4.0;
    let variance = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - tie_cubes(tie_groups) / 48.0;
    normal_p_value(w_plus, mean, variance, continuity_correction, alternative)
}

/// Signed-rank test with cached exact null tables.
///
/// Build it once with the sample sizes a simulation will hit; sizes without
/// a cached table are computed on demand.
#[derive(Debug, Clone)]
pub struct Wilcoxon {
    options: WilcoxonOptions,
    tables: Vec<SignedRankNull>,
}

impl Wilcoxon {
    pub fn new(options: WilcoxonOptions) -> Self {
        Self {
            options,
            tables: Vec::new(),
        }
    }

    /// Precomputes exact tables for every size in `sizes` that can be routed
    /// to the exact distribution.
    pub fn with_exact_tables(options: WilcoxonOptions, sizes: &[usize]) -> Self {
        let mut tables: Vec<SignedRankNull> = Vec::new();
        for &n in sizes {
            if n <= options.exact_threshold
                && n <= MAX_EXACT_N
                && !tables.iter().any(|t| t.n() == n)
            {
                tables.push(SignedRankNull::new(n).expect("size checked"));
            }
        }
        Self { options, tables }
    }

    pub fn options(&self) -> &WilcoxonOptions {
        &self.options
    }

    pub fn test(&self, sample: &PairedSample, alternative: Alternative) -> Result<TestResult> {
        self.test_slice(sample.values(), alternative)
    }

    pub(crate) fn test_slice(
        &self,
        values: &[f64],
        alternative: Alternative,
    ) -> Result<TestResult> {
        let ranks = signed_ranks_slice(values, self.options.zero_policy)?;
        let summary = RankSummary {
            w_plus: ranks.w_plus(),
            effective: ranks.effective(),
            zeros: ranks.dropped_zeros,
            ranked: ranks.ranked,
            tie_cubes: tie_cubes(&ranks.tie_groups),
        };
        let (p_value, method) = self.route(&summary, alternative)?;
        Ok(TestResult {
            statistic: summary.w_plus,
            companion: Some(ranks.w_minus()),
            p_value,
            method,
            dropped_zeros: ranks.dropped_zeros,
            tie_groups: ranks.tie_groups,
            alternative,
            df_or_n: summary.effective as f64,
        })
    }

    /// Two-sided (or one-sided) p-value only, reusing `scratch` so repeated
    /// calls do not allocate. Agrees exactly with [`Wilcoxon::test`].
    pub fn p_value_with(
        &self,
        values: &[f64],
        alternative: Alternative,
        scratch: &mut Vec<f64>,
    ) -> Result<f64> {
        scratch.clear();
        scratch.extend_from_slice(values);
        scratch.sort_unstable_by(|a, b| a.abs().total_cmp(&b.abs()));
        let zeros = scratch.iter().take_while(|&&v| v == 0.0).count();
        if zeros == scratch.len() {
            return Err(Error::DegenerateSample("no nonzero differences to rank"));
        }
        let first = match self.options.zero_policy {
            ZeroPolicy::Drop => zeros,
            ZeroPolicy::Pratt => 0,
        };
        let ranked = &scratch[first..];
        let mut w_plus = 0.0;
        let mut cubes = 0.0;
        let mut start = 0;
        while start < ranked.len() {
            let key = ranked[start].abs();
            let mut end = start + 1;
            let mut positives = usize::from(ranked[start] > 0.0);
            while end < ranked.len() && ranked[end].abs() == key {
                positives += usize::from(ranked[end] > 0.0);
                end += 1;
            }
            let len = end - start;
            if positives > 0 {
                w_plus += positives as f64 * (start + 1 + end) as f64 / 2.0;
            }
            if len > 1 {
                let t = len as f64;
                cubes += t * t * t - t;
            }
            start = end;
        }
        let summary = RankSummary {
            w_plus,
            effective: scratch.len() - zeros,
            zeros,
            ranked: ranked.len(),
            tie_cubes: cubes,
        };
        Ok(self.route(&summary, alternative)?.0)
    }

    fn route(&self, s: &RankSummary, alternative: Alternative) -> Result<(f64, Method)> {
        let m = s.effective;
        let exact = m <= self.options.exact_threshold
            && m <= MAX_EXACT_N
            && s.tie_cubes == 0.0
            && s.zeros == 0;
        if exact {
            let w = integral_statistic(s.w_plus)?;
            let p = match self.tables.iter().find(|t| t.n() == m) {
                Some(table) => table.p_value(w, alternative),
                None => SignedRankNull::new(m)?.p_value(w, alternative),
            };
            return Ok((p, Method::WilcoxonExact));
        }
        let (n, z) = match self.options.zero_policy {
            ZeroPolicy::Pratt => (s.ranked as f64, s.zeros as f64),
            ZeroPolicy::Drop => (m as f64, 0.0),
        };
        let mean = (n * (n + 1.0) - z * (z + 1.0)) / 4.0;
        let variance = (n * (n + 1.0) * (2.0 * n + 1.0) - z * (z + 1.0) * (2.0 * z + 1.0)) / 24.0
            - s.tie_cubes / 48.0;
        let p = normal_p_value(
            s.w_plus,
            mean,
            variance,
            self.options.continuity_correction,
            alternative,
        )?;
        Ok((p, Method::WilcoxonNormalApprox))
    }
}

struct RankSummary {
    w_plus: f64,
    effective: usize,
    zeros: usize,
    ranked: usize,
    tie_cubes: f64,
}

/// Wilcoxon signed-rank test, routing to the exact distribution when the
/// effective sample is small and free of ties and zeros.
pub fn wilcoxon_test(
    sample: &PairedSample,
    options: &WilcoxonOptions,
    alternative: Alternative,
) -> Result<TestResult> {
    Wilcoxon::new(*options).test(sample, alternative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(v: &[f64]) -> PairedSample {
        PairedSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn worked_example_ranks() {
        let s = sample(&[-0.4, -0.1, 0.4, 0.8]);
        let r = signed_ranks(&s, ZeroPolicy::Drop).unwrap();
        assert_eq!(r.ranks, vec![2.5, 1.0, 2.5, 4.0]);
        assert_eq!(r.tie_groups, vec![2]);
        assert_eq!(r.w_plus(), 6.5);
        assert_eq!(w_plus(&s, &WilcoxonOptions::default()).unwrap(), 6.5);
    }

    #[test]
    fn zeros_dropped_before_ranking() {
        let r = signed_ranks(&sample(&[0.0, 0.3]), ZeroPolicy::Drop).unwrap();
        assert_eq!(r.ranks, vec![1.0]);
        assert_eq!(r.dropped_zeros, 1);
        let r = signed_ranks(&sample(&[0.0, 0.3]), ZeroPolicy::Pratt).unwrap();
        assert_eq!(r.ranks, vec![2.0]);
        assert_eq!(r.ranked, 2);
        assert!(matches!(
            signed_ranks(&sample(&[0.0, 0.0]), ZeroPolicy::Drop),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn rank_sum_identity() {
        let s = sample(&[0.5, -0.2, 0.2, 0.9, -0.9, 0.2, 0.01, -1.3]);
        let r = signed_ranks(&s, ZeroPolicy::Drop).unwrap();
        let m = r.effective() as f64;
        assert_eq!(r.w_plus() + r.w_minus(), m * (m + 1.0) / 2.0);
        assert_eq!(r.ranks.iter().sum::<f64>(), m * (m + 1.0) / 2.0);
    }

    #[test]
    fn exact_tail_small_cases() {
        assert_eq!(wilcoxon_exact_tail(4, 10.0).unwrap(), 1.0 / 16.0);
        assert_eq!(wilcoxon_exact_tail(4, 0.0).unwrap(), 1.0);
        assert_eq!(wilcoxon_exact_tail(4, 11.0).unwrap(), 0.0);
        assert!(matches!(
            wilcoxon_exact_tail(4, 6.5),
            Err(Error::TiesPresent(_))
        ));
        let null = SignedRankNull::new(5).unwrap();
        let min_two_sided = (0..=15)
            .map(|w| null.p_value(w, Alternative::TwoSided))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min_two_sided, 0.0625);
        assert!(SignedRankNull::new(MAX_EXACT_N + 1).is_err());
    }

    #[test]
    fn normal_approx_at_mean_is_one() {
        let p = wilcoxon_normal_approx(25.0 * 26.0 / 4.0, 25, &[], false, Alternative::TwoSided)
            .unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn single_full_tie_group_keeps_positive_variance() {
        // m(m+1)(2m+1)/24 - (m^3 - m)/48 = m(m+1)^2/16 > 0
        let m = 5usize;
        let p = wilcoxon_normal_approx(15.0, m, &[m], true, Alternative::TwoSided).unwrap();
        let z = (15.0 - 7.5 - 0.5) / libm::sqrt(5.0 * 36.0 / 16.0);
        assert_abs_diff_eq!(p, 2.0 * normal_sf(z), epsilon = 1e-15);
        assert!(matches!(
            wilcoxon_normal_approx(0.0, 0, &[], true, Alternative::TwoSided),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn routing() {
        let opts = WilcoxonOptions::default();
        let r = wilcoxon_test(
            &sample(&[-0.4, -0.1, 0.4, 0.8]),
            &opts,
            Alternative::TwoSided,
        )
        .unwrap();
        // Ties present, so the approximation is used.
        assert_eq!(r.statistic, 6.5);
        assert_eq!(r.companion, Some(3.5));
        assert_eq!(r.method, Method::WilcoxonNormalApprox);
        let r = wilcoxon_test(
            &sample(&[-0.4, -0.1, 0.5, 0.8]),
            &opts,
            Alternative::TwoSided,
        )
        .unwrap();
        assert_eq!(r.method, Method::WilcoxonExact);
        assert_eq!(r.statistic, 7.0);
        let r = wilcoxon_test(
            &sample(&[0.0, -0.1, 0.5, 0.8]),
            &opts,
            Alternative::TwoSided,
        )
        .unwrap();
        assert_eq!(r.method, Method::WilcoxonNormalApprox);
        assert_eq!(r.dropped_zeros, 1);
    }

    #[test]
    fn five_distinct_values_never_reject() {
        let opts = WilcoxonOptions::default();
        let r = wilcoxon_test(
            &sample(&[0.1, 0.2, 0.3, 0.4, 0.5]),
            &opts,
            Alternative::TwoSided,
        )
        .unwrap();
        assert_eq!(r.p_value, 0.0625);
        assert!(!r.rejects(0.05));
    }

    #[test]
    fn pratt_matches_drop_without_zeros() {
        let s = sample(&[0.3, -0.1, 0.25, 0.9, -0.05, 0.6, 0.6]);
        let drop = WilcoxonOptions::default();
        let pratt = WilcoxonOptions {
            zero_policy: ZeroPolicy::Pratt,
            ..drop
        };
        assert_eq!(
            wilcoxon_test(&s, &drop, Alternative::TwoSided).unwrap(),
            wilcoxon_test(&s, &pratt, Alternative::TwoSided).unwrap()
        );
    }

    #[test]
    fn pratt_with_zeros() {
        // Ranks of |D| = {0, 0, 1, 2, 3}: zeros share 1.5, then 3, 4, 5.
        let s = sample(&[0.0, 0.0, 1.0, 2.0, -3.0]);
        let opts = WilcoxonOptions {
            zero_policy: ZeroPolicy::Pratt,
            ..WilcoxonOptions::default()
        };
        let r = wilcoxon_test(&s, &opts, Alternative::TwoSided).unwrap();
        assert_eq!(r.statistic, 7.0);
        assert_eq!(r.companion, Some(5.0));
        assert_eq!(r.tie_groups, vec![2]);
        let mean = (30.0 - 6.0) / 4.0;
        let var = (5.0 * 6.0 * 11.0 - 2.0 * 3.0 * 5.0) / 24.0 - 6.0 / 48.0;
        let z = (7.0 - mean - 0.5) / libm::sqrt(var);
        assert_abs_diff_eq!(r.p_value, 2.0 * normal_sf(z), epsilon = 1e-15);
    }
}
