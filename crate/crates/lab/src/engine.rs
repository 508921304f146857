//! Parallel Monte Carlo over grid cells.
//!
//! Every replicate draws from its own `(seed, cell, replicate)` stream and
//! results are reduced as integer counts, so reports do not depend on the
//! number of worker threads or on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use pairsig_core::calibration::{
    calibrate_pools, calibrate_tails, pool_mask, CellOptions, DepartureGrid, Dimension, Mechanism,
    PooledLevel, SIGMA_D,
};
use pairsig_core::diagnostics::sample_skewness;
use pairsig_core::distributions::{ibb_support, DistributionSpec, Family, Metric, Shape};
use pairsig_core::montecarlo::{
    ks_distance_student_t, Histogram, Outcome, ReplicateKernel, Scratch, Tally, TestKind,
};
use pairsig_core::paired::{Wilcoxon, WilcoxonOptions};
use pairsig_core::rng::RandomStream;

use crate::LabError;

pub const DEFAULT_REPLICATES: u64 = 100_000;
pub const DESK_REPLICATES: u64 = 10_000;
pub const DEFAULT_SAMPLE_SIZES: [usize; 4] = [5, 50, 500, 5000];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub replicates: u64,
    pub alpha: f64,
    pub seed: u64,
    pub tests: Vec<TestKind>,
    pub wilcoxon: WilcoxonOptions,
    /// Worker threads; `None` uses rayon's default.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            alpha: 0.05,
            seed: 0,
            tests: TestKind::ALL.to_vec(),
            wilcoxon: WilcoxonOptions::default(),
            workers: None,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.replicates == 0 {
            return Err(LabError::Config("replicates must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(LabError::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.tests.is_empty() || self.tests.len() > 2 {
            return Err(LabError::Config("select one or both of t, wilcoxon".into()));
        }
        if self.workers == Some(0) {
            return Err(LabError::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    /// Runs `f` inside a pool with the configured number of workers.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R, LabError> {
        match self.workers {
            None => Ok(f()),
            Some(w) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// One simulated cell at one sample size. A cell with several components
/// draws replicate `r` from component `r mod len`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub grid: String,
    /// Mechanism tag, `+`-joined for pooled cells.
    pub family: String,
    pub level: String,
    pub target: f64,
    pub n: usize,
    pub components: Vec<DistributionSpec>,
    /// Stream index; stable for a given (grid, mechanisms, level, n).
    pub id: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub grid: String,
    pub family: String,
    pub level: String,
    pub target: f64,
    pub n: usize,
    pub test: String,
    pub rate: f64,
    pub se: f64,
    pub replicates: u64,
    pub rejections: u64,
    pub degenerate: u64,
    pub seed: u64,
    pub cell: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub replicates: u64,
    pub alpha: f64,
    pub rows: Vec<ReportRow>,
}

impl SimulationReport {
    pub fn find(
        &self,
        grid: &str,
        family: &str,
        level: &str,
        n: usize,
        test: TestKind,
    ) -> Option<&ReportRow> {
        self.rows.iter().find(|r| {
            r.grid == grid
                && r.family == family
                && r.level == level
                && r.n == n
                && r.test == test.name()
        })
    }
}

/// Stream index of a cell: grid, mechanism set (a bit mask, see
/// [`pool_mask`]), level and sample size packed into disjoint fields.
pub fn cell_id(grid_index: u64, mechanisms: u64, level: usize, n: usize) -> u64 {
    ((grid_index * 128 + mechanisms) * 100 + level as u64) * 1_000_000_000 + n as u64
}

fn grid_index(name: &str) -> u64 {
    match name {
        "asymmetric" => 1,
        "heavy" => 2,
        "light" => 3,
        "discrete" => 4,
        "demo-table1" => 5,
        "normal" => 6,
        _ => 9,
    }
}

pub fn cells_for_levels(levels: &[PooledLevel], sizes: &[usize]) -> Vec<Cell> {
    let mut cells = Vec::new();
    for lvl in levels {
        let grid = lvl.dimension.name();
        for &n in sizes {
            cells.push(Cell {
                grid: grid.to_string(),
                family: lvl.tag(),
                level: lvl.label.to_string(),
                target: lvl.target,
                n,
                components: lvl.components.iter().map(|c| c.spec.clone()).collect(),
                id: cell_id(grid_index(grid), pool_mask(&lvl.mechanisms()), lvl.level, n),
            });
        }
    }
    cells
}

/// Grid selection of the `simulate` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSelection {
    All,
    Dimension(Dimension),
    DemoTable1,
    Normal,
}

impl GridSelection {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(GridSelection::All),
            "demo-table1" => Some(GridSelection::DemoTable1),
            "normal" => Some(GridSelection::Normal),
            other => Dimension::parse(other).map(GridSelection::Dimension),
        }
    }
}

/// Demonstration distributions, one per kind of departure, standardized to
/// sd 0.22 (IBB through its concentration).
pub fn demo_specs() -> Result<Vec<(String, Mechanism, DistributionSpec)>, LabError> {
    let support = ibb_support(Metric::ReciprocalRankAtK, 10)?;
    let discrete = pairsig_core::calibration::calibrate_ibb(
        &support,
        SIGMA_D,
        pairsig_core::calibration::IbbRangePolicy::Error,
    )?;
    Ok(vec![
        (
            "asymmetric".into(),
            Mechanism::Family(Family::Tgh),
            pairsig_core::calibration::calibrate_skewness(Family::Tgh, 3.0)?,
        ),
        (
            "heavy-tailed".into(),
            Mechanism::Family(Family::Sgn),
            calibrate_tails(Family::Sgn, 15.0)?,
        ),
        (
            "discrete".into(),
            Mechanism::Ibb(Metric::ReciprocalRankAtK),
            discrete,
        ),
        (
            "multimodal".into(),
            Mechanism::Family(Family::BimodalMixture),
            DistributionSpec::new(Shape::BimodalMixture { separation: 2.0 }, 0.0, SIGMA_D)?,
        ),
    ])
}

/// Cells of a grid selection crossed with the sample sizes.
pub fn build_cells(
    selection: GridSelection,
    grid: &DepartureGrid,
    options: &CellOptions,
    sizes: &[usize],
) -> Result<Vec<Cell>, LabError> {
    match selection {
        GridSelection::All => {
            let mut cells = Vec::new();
            for d in Dimension::ALL {
                cells.extend(cells_for_levels(&calibrate_pools(grid, d, options)?, sizes));
            }
            Ok(cells)
        }
        GridSelection::Dimension(d) => {
            Ok(cells_for_levels(&calibrate_pools(grid, d, options)?, sizes))
        }
        GridSelection::DemoTable1 => {
            let mut cells = Vec::new();
            for (i, (label, mechanism, spec)) in demo_specs()?.into_iter().enumerate() {
                for &n in sizes {
                    cells.push(Cell {
                        grid: "demo-table1".into(),
                        family: mechanism.tag(),
                        level: label.clone(),
                        target: f64::NAN,
                        n,
                        components: vec![spec.clone()],
                        id: cell_id(grid_index("demo-table1"), pool_mask(&[mechanism]), i, n),
                    });
                }
            }
            Ok(cells)
        }
        GridSelection::Normal => {
            Ok(sizes
                .iter()
                .map(|&n| Cell {
                    grid: "normal".into(),
                    family: Family::Normal.name().to_string(),
                    level: "None".into(),
                    target: 0.0,
                    n,
                    components: vec![
                        DistributionSpec::new(Shape::Normal, 0.0, SIGMA_D).expect("valid")
                    ],
                    id: cell_id(
                        grid_index("normal"),
                        pool_mask(&[Mechanism::Family(Family::Normal)]),
                        0,
                        n,
                    ),
                })
                .collect())
        }
    }
}

fn kernel(
    spec: &DistributionSpec,
    n: usize,
    config: &SimulationConfig,
) -> Result<ReplicateKernel, LabError> {
    let wilcoxon = Wilcoxon::with_exact_tables(config.wilcoxon, &[n]);
    Ok(ReplicateKernel::new(
        spec.sampler()?,
        n,
        config.alpha,
        config.tests.clone(),
        wilcoxon,
    )?)
}

/// Tallies of each configured test for one cell (runs in the current pool).
/// Replicate `r` draws from `components[r % components.len()]`.
pub fn simulate_cell(
    components: &[DistributionSpec],
    n: usize,
    cell_id: u64,
    config: &SimulationConfig,
) -> Result<Vec<Tally>, LabError> {
    if components.is_empty() {
        return Err(LabError::Config("cell without components".into()));
    }
    let kernels = components
        .iter()
        .map(|spec| kernel(spec, n, config))
        .collect::<Result<Vec<_>, _>>()?;
    let m = kernels.len() as u64;
    let base = RandomStream::new(config.seed).cell(cell_id);
    let tallies = (0..config.replicates)
        .into_par_iter()
        .map_init(Scratch::new, |scratch, r| {
            kernels[(r % m) as usize].run(base.replicate(r), scratch)
        })
        .fold(
            || [Tally::default(); 2],
            |mut acc, outcomes| {
                for (t, o) in acc.iter_mut().zip(outcomes) {
                    if let Some(o) = o {
                        t.record(o);
                    }
                }
                acc
            },
        )
        .reduce(
            || [Tally::default(); 2],
            |a, b| [a[0].merge(b[0]), a[1].merge(b[1])],
        );
    Ok(tallies[..config.tests.len()].to_vec())
}

/// Rejection rate of each configured test under `spec` at sample size `n`.
pub fn type1_rate(
    spec: &DistributionSpec,
    n: usize,
    cell_id: u64,
    config: &SimulationConfig,
) -> Result<Vec<(TestKind, Tally)>, LabError> {
    config.validate()?;
    let tallies =
        config.install(|| simulate_cell(std::slice::from_ref(spec), n, cell_id, config))??;
    Ok(config.tests.iter().copied().zip(tallies).collect())
}

/// Simulates every cell; rows are ordered cell-major, then by test.
pub fn run_cells(cells: &[Cell], config: &SimulationConfig) -> Result<SimulationReport, LabError> {
    config.validate()?;
    let mut rows = Vec::with_capacity(cells.len() * config.tests.len());
    config.install(|| -> Result<(), LabError> {
        for cell in cells {
            let tallies =
                simulate_cell(&cell.components, cell.n, cell.id, config).map_err(|e| {
                    LabError::Cell(
                        format!("{}/{}/{}/n={}", cell.grid, cell.family, cell.level, cell.n),
                        Box::new(e),
                    )
                })?;
            for (test, tally) in config.tests.iter().zip(tallies) {
                rows.push(ReportRow {
                    grid: cell.grid.clone(),
                    family: cell.family.clone(),
                    level: cell.level.clone(),
                    target: cell.target,
                    n: cell.n,
                    test: test.name().to_string(),
                    rate: tally.rate(),
                    se: tally.standard_error(),
                    replicates: tally.replicates,
                    rejections: tally.rejections,
                    degenerate: tally.degenerate,
                    seed: config.seed,
                    cell: cell.id,
                });
            }
        }
        Ok(())
    })??;
    Ok(SimulationReport {
        seed: config.seed,
        replicates: config.replicates,
        alpha: config.alpha,
        rows,
    })
}

/// Calibrates the selected grid and simulates it.
pub fn run_grid(
    selection: GridSelection,
    grid: &DepartureGrid,
    options: &CellOptions,
    sizes: &[usize],
    config: &SimulationConfig,
) -> Result<SimulationReport, LabError> {
    let cells = build_cells(selection, grid, options, sizes)?;
    run_cells(&cells, config)
}

/// Empirical distribution of the t-statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TDistributionSummary {
    pub n: usize,
    pub replicates: u64,
    pub degenerate: u64,
    pub ks_distance: f64,
    /// Fraction of statistics below / above the two-sided 5% critical values
    /// of T(n-1).
    pub lower_tail: f64,
    pub upper_tail: f64,
    pub histogram: Histogram,
    #[serde(skip)]
    pub sorted: Vec<f64>,
}

fn t_critical(df: f64, alpha: f64) -> f64 {
    // Upper alpha/2 quantile of T(df) by bisection on the cdf.
    let target = 1.0 - alpha / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while pairsig_core::special::student_t_cdf(hi, df) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pairsig_core::special::student_t_cdf(mid, df) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Replicate t-statistics of samples of size `n` from `spec`, their
/// histogram over `[low, high)` and the KS distance to T(n-1).
#[allow(clippy::too_many_arguments)]
pub fn t_sampling_distribution(
    spec: &DistributionSpec,
    n: usize,
    replicates: u64,
    stream: RandomStream,
    low: f64,
    high: f64,
    bins: usize,
    workers: Option<usize>,
) -> Result<TDistributionSummary, LabError> {
    let k = ReplicateKernel::new(
        spec.sampler()?,
        n,
        0.05,
        Vec::new(),
        Wilcoxon::new(WilcoxonOptions::default()),
    )?;
    let config = SimulationConfig {
        workers,
        ..SimulationConfig::default()
    };
    let stats: Vec<Option<f64>> = config.install(|| {
        (0..replicates)
            .into_par_iter()
            .map_init(Scratch::new, |s, r| k.t_statistic(stream.replicate(r), s))
            .collect()
    })?;
    let degenerate = stats.iter().filter(|s| s.is_none()).count() as u64;
    let mut sorted: Vec<f64> = stats.into_iter().flatten().collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut histogram = Histogram::new(low, high, bins)?;
    for &t in &sorted {
        histogram.add(t);
    }
    let df = (n - 1) as f64;
    let crit = t_critical(df, 0.05);
    let m = sorted.len().max(1) as f64;
    let lower_tail = sorted.partition_point(|&t| t < -crit) as f64 / m;
    let upper_tail = (sorted.len() - sorted.partition_point(|&t| t <= crit)) as f64 / m;
    Ok(TDistributionSummary {
        n,
        replicates,
        degenerate,
        ks_distance: ks_distance_student_t(&sorted, df),
        lower_tail,
        upper_tail,
        histogram,
        sorted,
    })
}

/// Distribution of the sample skewness under a symmetric distribution with
/// excess kurtosis `kappa`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewnessReference {
    pub kappa: f64,
    pub family: Family,
    pub n: usize,
    pub replicates: u64,
    pub mean: f64,
    pub sd: f64,
    /// 2.5%, 25%, 50%, 75% and 97.5% quantiles.
    pub quantiles: [f64; 5],
    #[serde(skip)]
    pub sorted: Vec<f64>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

pub fn symmetric_skewness_reference(
    kappa: f64,
    family: Family,
    n: usize,
    replicates: u64,
    stream: RandomStream,
    workers: Option<usize>,
) -> Result<SkewnessReference, LabError> {
    let spec = calibrate_tails(family, kappa)?;
    let sampler = spec.sampler()?;
    let config = SimulationConfig {
        workers,
        ..SimulationConfig::default()
    };
    let values: Vec<Option<f64>> = config.install(|| {
        (0..replicates)
            .into_par_iter()
            .map_init(
                || vec![0.0; n],
                |buf, r| {
                    let mut rng = stream.replicate(r).rng();
                    sampler.fill(&mut rng, buf);
                    sample_skewness(buf)
                },
            )
            .collect()
    })?;
    let mut sorted: Vec<f64> = values.into_iter().flatten().collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / m;
    let sd = (sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0)).sqrt();
    let quantiles = [0.025, 0.25, 0.5, 0.75, 0.975].map(|q| quantile(&sorted, q));
    Ok(SkewnessReference {
        kappa,
        family,
        n,
        replicates,
        mean,
        sd,
        quantiles,
        sorted,
    })
}

/// Outcome counts for a single replicate, exposed for tests.
pub fn replicate_outcomes(
    spec: &DistributionSpec,
    n: usize,
    cell_id: u64,
    replicate: u64,
    config: &SimulationConfig,
) -> Result<[Option<Outcome>; 2], LabError> {
    let k = kernel(spec, n, config)?;
    let mut scratch = Scratch::new();
    Ok(k.run(
        RandomStream::new(config.seed)
            .cell(cell_id)
            .replicate(replicate),
        &mut scratch,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_ids_are_distinct() {
        let agn = pool_mask(&[Mechanism::Family(Family::Agn)]);
        let tgh = pool_mask(&[Mechanism::Family(Family::Tgh)]);
        let a = cell_id(1, agn, 5, 5000);
        let b = cell_id(1, tgh, 5, 5000);
        let c = cell_id(1, agn, 4, 5000);
        let d = cell_id(1, agn | tgh, 5, 5000);
        assert_eq!(
            d,
            cell_id(
                1,
                pool_mask(&[
                    Mechanism::Family(Family::Tgh),
                    Mechanism::Family(Family::Agn)
                ]),
                5,
                5000
            )
        );
        let ids = [a, b, c, d];
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(ids[i], ids[j]);
            }
        }
    }

    #[test]
    fn critical_value() {
        assert!((t_critical(10.0, 0.05) - 2.228_138_851_986_274).abs() < 1e-9);
    }

    #[test]
    fn quantiles_interpolate() {
        assert_eq!(quantile(&[0.0, 1.0, 2.0], 0.25), 0.5);
    }
}
