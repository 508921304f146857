//! Single-replicate Monte Carlo kernel and the summaries built from it.
//! Scheduling across workers lives in the std crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::distributions::Sampler;
use crate::paired::{t_test_slice, Alternative, Wilcoxon};
use crate::rng::RandomStream;
use crate::special::student_t_cdf;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TestKind {
    T,
    Wilcoxon,
}

impl TestKind {
    pub const ALL: [TestKind; 2] = [TestKind::T, TestKind::Wilcoxon];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::T => "t",
            TestKind::Wilcoxon => "wilcoxon",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t" | "ttest" | "t-test" => Some(TestKind::T),
            "wilcoxon" | "w" | "signed-rank" => Some(TestKind::Wilcoxon),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Reject,
    Retain,
    /// The test could not be computed on this replicate (e.g. zero variance).
    Degenerate,
}

/// Rejection counts over a set of replicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tally {
    pub replicates: u64,
    pub rejections: u64,
    pub degenerate: u64,
}

impl Tally {
    pub fn record(&mut self, outcome: Outcome) {
        self.replicates += 1;
        match outcome {
            Outcome::Reject => self.rejections += 1,
            Outcome::Retain => {}
            Outcome::Degenerate => self.degenerate += 1,
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.replicates += other.replicates;
        self.rejections += other.rejections;
        self.degenerate += other.degenerate;
        self
    }

    /// Fraction of replicates rejecting; degenerate replicates count as retained.
    pub fn rate(&self) -> f64 {
        if self.replicates == 0 {
            0.0
        } else {
            self.rejections as f64 / self.replicates as f64
        }
    }

    pub fn standard_error(&self) -> f64 {
        rate_standard_error(self.rate(), self.replicates)
    }
}

/// `√(r(1-r)/R)`.
pub fn rate_standard_error(rate: f64, replicates: u64) -> f64 {
    if replicates == 0 {
        return 0.0;
    }
    libm::sqrt(rate * (1.0 - rate) / replicates as f64)
}

/// Everything a replicate needs, shared read-only across workers.
#[derive(Debug, Clone)]
pub struct ReplicateKernel {
    pub sampler: Sampler,
    pub n: usize,
    pub alpha: f64,
    pub tests: Vec<TestKind>,
    pub wilcoxon: Wilcoxon,
}

/// Per-worker reusable buffers.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    draws: Vec<f64>,
    ranks: Vec<f64>,
}

impl Scratch {
    pub fn new() -> Self {
        Self::default()
    }
}

fn outcome(p: Result<f64>, alpha: f64) -> Outcome {
    match p {
        Ok(p) if p < alpha => Outcome::Reject,
        Ok(_) => Outcome::Retain,
        Err(_) => Outcome::Degenerate,
    }
}

impl ReplicateKernel {
    pub fn new(
        sampler: Sampler,
        n: usize,
        alpha: f64,
        tests: Vec<TestKind>,
        wilcoxon: Wilcoxon,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewObservations {
                required: 2,
                actual: n,
            });
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::ParameterDomain(alloc::format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(Self {
            sampler,
            n,
            alpha,
            tests,
            wilcoxon,
        })
    }

    /// Draws the replicate addressed by `stream` into the scratch buffer.
    pub fn draw<'a>(&self, stream: RandomStream, scratch: &'a mut Scratch) -> &'a [f64] {
        scratch.draws.resize(self.n, 0.0);
        let mut rng = stream.rng();
        self.sampler.fill(&mut rng, &mut scratch.draws);
        &scratch.draws
    }

    /// Outcome of each configured test on one replicate, in `tests` order.
    pub fn run(&self, stream: RandomStream, scratch: &mut Scratch) -> [Option<Outcome>; 2] {
        self.draw(stream, scratch);
        let mut out = [None; 2];
        for (slot, &kind) in out.iter_mut().zip(&self.tests) {
            let p = match kind {
                TestKind::T => {
                    t_test_slice(&scratch.draws, Alternative::TwoSided).map(|r| r.p_value)
                }
                TestKind::Wilcoxon => self.wilcoxon.p_value_with(
                    &scratch.draws,
                    Alternative::TwoSided,
                    &mut scratch.ranks,
                ),
            };
            *slot = Some(outcome(p, self.alpha));
        }
        out
    }

    /// t-statistic of one replicate, `None` when degenerate.
    pub fn t_statistic(&self, stream: RandomStream, scratch: &mut Scratch) -> Option<f64> {
        let values = self.draw(stream, scratch);
        crate::paired::t_statistic_slice(values)
            .ok()
            .map(|(t, _)| t)
    }
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `sorted` (ascending) and a continuous cdf.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// KS distance of sorted statistics to the Student t with `df` degrees of freedom.
pub fn ks_distance_student_t(sorted: &[f64], df: f64) -> f64 {
    ks_distance(sorted, |x| student_t_cdf(x, df))
}

/// Equal-width histogram over `[low, high)`; values outside are counted apart.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub low: f64,
    pub high: f64,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
}

impl Histogram {
    pub fn new(low: f64, high: f64, bins: usize) -> Result<Self> {
        if !(high > low) || bins == 0 || !low.is_finite() || !high.is_finite() {
            return Err(Error::ParameterDomain(alloc::format!(
                "histogram needs low < high and bins > 0, got [{low}, {high}) with {bins} bins"
            )));
        }
        Ok(Self {
            low,
            high,
            counts: vec![0; bins],
            below: 0,
            above: 0,
        })
    }

    pub fn bin_width(&self) -> f64 {
        (self.high - self.low) / self.counts.len() as f64
    }

    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.low + w * i as f64, self.low + w * (i + 1) as f64)
    }

    pub fn add(&mut self, x: f64) {
        if x < self.low {
            self.below += 1;
        } else if x >= self.high {
            self.above += 1;
        } else {
            let bins = self.counts.len();
            let i = (((x - self.low) / self.bin_width()) as usize).min(bins - 1);
            self.counts[i] += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.below + self.above
    }
}

/// Empirical cdf evaluated at `points` from ascending `sorted` data.
pub fn ecdf(sorted: &[f64], points: &[f64]) -> Vec<f64> {
    let n = sorted.len() as f64;
    points
        .iter()
        .map(|&x| sorted.partition_point(|&v| v <= x) as f64 / n)
        .collect()
}
