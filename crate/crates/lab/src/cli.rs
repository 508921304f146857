//! `pairsig` command line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pairsig_core::calibration::{
    calibrate_dimension, CellOptions, DepartureGrid, Dimension, IbbRangePolicy, Mechanism, Pool,
    SIGMA_D,
};
use pairsig_core::diagnostics::{diagnose, resample_to_n, DiagnoseOptions};
use pairsig_core::distributions::{ibb_support, DistributionSpec, Family, Metric};
use pairsig_core::montecarlo::TestKind;
use pairsig_core::paired::{WilcoxonOptions, ZeroPolicy};
use pairsig_core::rng::RandomStream;

use crate::engine::{
    self, build_cells, run_cells, symmetric_skewness_reference, t_sampling_distribution,
    GridSelection, SimulationConfig, DESK_REPLICATES,
};
use crate::ingest::{load_score_matrix, paired_differences, InputFormat};
use crate::report::{self, sig6, write_csv, write_json, OutputFormat};
use crate::specfile::parse_spec;
use crate::LabError;

pub const DEFAULT_SEED: u64 = 20_250_705;
pub const SEED_ENV: &str = "PAIRSIG_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "pairsig",
    version,
    about = "Paired significance test laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type I error rates over a departure grid.
    Simulate(SimulateArgs),
    /// Empirical sampling distribution of the t-statistic.
    Clt(CltArgs),
    /// Sample-skewness distribution under symmetric heavy tails.
    MomentsReference(MomentsReferenceArgs),
    /// Moments and both tests for every system pair of a score matrix.
    Diagnose(DiagnoseArgs),
    /// Solved shape parameters for the departure grids.
    Calibrate(CalibrateArgs),
    /// Attainable differences of a metric at cutoff k.
    Support(SupportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Base seed of every random stream.
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo replicates (overrides --desk).
    #[arg(long)]
    pub replicates: Option<u64>,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Output file (stdout when omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Desk-scale preset: 10000 replicates.
    #[arg(long)]
    pub desk: bool,
    /// Worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl Common {
    fn replicates(&self, full: u64) -> u64 {
        self.replicates
            .unwrap_or(if self.desk { DESK_REPLICATES } else { full })
    }

    fn validate(&self) -> Result<(), LabError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(LabError::Config(format!(
                "--alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.replicates == Some(0) {
            return Err(LabError::Config("--replicates must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(LabError::Config("--workers must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    All,
    Asymmetric,
    Heavy,
    Light,
    Discrete,
    DemoTable1,
    Normal,
}

impl GridArg {
    fn selection(self) -> GridSelection {
        match self {
            GridArg::All => GridSelection::All,
            GridArg::Asymmetric => GridSelection::Dimension(Dimension::Asymmetry),
            GridArg::Heavy => GridSelection::Dimension(Dimension::HeavyTails),
            GridArg::Light => GridSelection::Dimension(Dimension::LightTails),
            GridArg::Discrete => GridSelection::Dimension(Dimension::Discreteness),
            GridArg::DemoTable1 => GridSelection::DemoTable1,
            GridArg::Normal => GridSelection::Normal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Sgn,
    Agn,
    Tgh,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Sgn => Family::Sgn,
            FamilyArg::Agn => Family::Agn,
            FamilyArg::Tgh => Family::Tgh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    P,
    Rr,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::P => Metric::PrecisionAtK,
            MetricArg::Rr => Metric::ReciprocalRankAtK,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestArg {
    T,
    Wilcoxon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroArg {
    Drop,
    Pratt,
}

/// Parses `agn,tgh,agn+tgh`: a comma-separated list of cells, each a
/// `+`-joined set of mechanisms pooled into one cell.
pub fn parse_pools(s: &str) -> Result<Pools, String> {
    let mut pools = Vec::new();
    for cell in s.split(',') {
        let mut pool = Pool::new();
        for name in cell.split('+') {
            let m = Mechanism::parse(name).ok_or_else(|| {
                format!("unknown mechanism {name:?} (sgn, agn, tgh, ibb-p, ibb-rr)")
            })?;
            if pool.contains(&m) {
                return Err(format!("{m} appears twice in {cell:?}"));
            }
            pool.push(m);
        }
        if !pools.contains(&pool) {
            pools.push(pool);
        }
    }
    Ok(Pools(pools))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pools(pub Vec<Pool>);

#[derive(Debug, Clone, Args)]
pub struct GridOptions {
    /// Cells of the asymmetric grid: comma-separated, `+` pools mechanisms
    /// into one cell.
    #[arg(long, value_parser = parse_pools, default_value = "agn,tgh,agn+tgh")]
    pub asymmetric: Pools,
    /// Cells of the heavy-tail grid.
    #[arg(long, value_parser = parse_pools, default_value = "sgn+tgh")]
    pub heavy: Pools,
    /// Cells of the light-tail grid (only sgn reaches negative kurtosis).
    #[arg(long, value_parser = parse_pools, default_value = "sgn")]
    pub light: Pools,
    /// Cells of the discrete grid.
    #[arg(long, value_parser = parse_pools, default_value = "ibb-p+ibb-rr")]
    pub discrete: Pools,
    /// Target sd of the discrete distributions.
    #[arg(long, default_value_t = SIGMA_D)]
    pub ibb_sd: f64,
    /// Fail instead of using the nearest attainable sd when the target is
    /// out of reach.
    #[arg(long)]
    pub ibb_strict: bool,
}

impl GridOptions {
    pub fn cell_options(&self) -> CellOptions {
        CellOptions {
            asymmetric: self.asymmetric.0.clone(),
            heavy: self.heavy.0.clone(),
            light: self.light.0.clone(),
            discrete: self.discrete.0.clone(),
            ibb_target_sd: self.ibb_sd,
            ibb_policy: if self.ibb_strict {
                IbbRangePolicy::Error
            } else {
                IbbRangePolicy::Clamp
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct WilcoxonArgs {
    #[arg(long, value_enum, default_value_t = ZeroArg::Drop)]
    pub zero_policy: ZeroArg,
    /// Largest effective n routed to the exact distribution.
    #[arg(long, default_value_t = 50)]
    pub exact_threshold: usize,
    /// Disable the continuity correction of the normal approximation.
    #[arg(long)]
    pub no_continuity_correction: bool,
}

impl WilcoxonArgs {
    pub fn options(&self) -> WilcoxonOptions {
        WilcoxonOptions {
            zero_policy: match self.zero_policy {
                ZeroArg::Drop => ZeroPolicy::Drop,
                ZeroArg::Pratt => ZeroPolicy::Pratt,
            },
            exact_threshold: self.exact_threshold,
            continuity_correction: !self.no_continuity_correction,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = GridArg::All)]
    pub grid: GridArg,
    /// Sample sizes.
    #[arg(long = "n", value_delimiter = ',', default_values_t = engine::DEFAULT_SAMPLE_SIZES)]
    pub sizes: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [TestArg::T, TestArg::Wilcoxon])]
    pub tests: Vec<TestArg>,
    #[command(flatten)]
    pub grid_options: GridOptions,
    #[command(flatten)]
    pub wilcoxon: WilcoxonArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Normal,
    Asymmetric,
    Heavy,
    Discrete,
    Multimodal,
}

#[derive(Debug, Clone, Args)]
pub struct CltArgs {
    /// Spec file (`key = value` lines).
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    /// Built-in demonstration distribution.
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[arg(long = "n", value_delimiter = ',', default_values_t = [5usize, 10, 50])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 120)]
    pub bins: usize,
    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    pub low: f64,
    #[arg(long, default_value_t = 6.0)]
    pub high: f64,
    /// Directory for one histogram CSV per sample size.
    #[arg(long)]
    pub histograms: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsReferenceArgs {
    /// Excess kurtosis levels.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_values_t = [0.0, 0.5, 1.5, 3.0, 5.0, 15.0, 30.0])]
    pub kappa: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::Sgn)]
    pub family: FamilyArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    /// Score matrix (wide CSV or long `system topic score` text).
    #[arg(long)]
    pub input: PathBuf,
    /// Input layout; inferred from the extension when omitted.
    #[arg(long, value_parser = ["wide", "long"])]
    pub input_format: Option<String>,
    /// Resample every pair to this many topics.
    #[arg(long = "n", default_value_t = 50)]
    pub n: usize,
    /// Resampling repeats per pair.
    #[arg(long, default_value_t = 1)]
    pub repeats: u64,
    /// |skewness| above which a pair is flagged.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[command(flatten)]
    pub wilcoxon: WilcoxonArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DimensionArg {
    All,
    Asymmetric,
    Heavy,
    Light,
    Discrete,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[arg(long, value_enum, default_value_t = DimensionArg::All)]
    pub dimension: DimensionArg,
    #[command(flatten)]
    pub grid_options: GridOptions,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SupportArgs {
    #[arg(long, value_enum)]
    pub metric: MetricArg,
    #[arg(long)]
    pub k: u32,
    #[command(flatten)]
    pub common: Common,
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, LabError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| LabError::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(std::io::stdout().lock()))),
    }
}

pub fn run(cli: Cli) -> Result<(), LabError> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Clt(a) => clt(a),
        Command::MomentsReference(a) => moments_reference(a),
        Command::Diagnose(a) => diagnose_cmd(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Support(a) => support(a),
    }
}

fn simulate(a: SimulateArgs) -> Result<(), LabError> {
    a.common.validate()?;
    if a.sizes.iter().any(|&n| n < 2) {
        return Err(LabError::Config("every --n must be >= 2".into()));
    }
    let mut tests = Vec::new();
    for t in &a.tests {
        let kind = match t {
            TestArg::T => TestKind::T,
            TestArg::Wilcoxon => TestKind::Wilcoxon,
        };
        if !tests.contains(&kind) {
            tests.push(kind);
        }
    }
    let config = SimulationConfig {
        replicates: a.common.replicates(engine::DEFAULT_REPLICATES),
        alpha: a.common.alpha,
        seed: a.common.seed,
        tests,
        wilcoxon: a.wilcoxon.options(),
        workers: a.common.workers,
    };
    let cells = build_cells(
        a.grid.selection(),
        &DepartureGrid::default(),
        &a.grid_options.cell_options(),
        &a.sizes,
    )?;
    let report = run_cells(&cells, &config)?;
    let out = open_output(a.common.output.as_deref())?;
    report::write_simulation(out, &report, a.common.format.into())
}

fn preset_spec(p: PresetArg) -> Result<DistributionSpec, LabError> {
    let demos = engine::demo_specs()?;
    let pick = |i: usize| demos[i].2.clone();
    Ok(match p {
        PresetArg::Normal => {
            DistributionSpec::new(pairsig_core::distributions::Shape::Normal, 0.0, SIGMA_D)?
        }
        PresetArg::Asymmetric => pick(0),
        PresetArg::Heavy => pick(1),
        PresetArg::Discrete => pick(2),
        PresetArg::Multimodal => pick(3),
    })
}

fn clt(a: CltArgs) -> Result<(), LabError> {
    a.common.validate()?;
    let (label, spec) = match (&a.spec, a.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
            (path.display().to_string(), parse_spec(&text)?)
        }
        (None, Some(p)) => (
            p.to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default(),
            preset_spec(p)?,
        ),
        (None, None) => return Err(LabError::Config("give --spec FILE or --preset NAME".into())),
    };
    if a.sizes.iter().any(|&n| n < 2) {
        return Err(LabError::Config("every --n must be >= 2".into()));
    }
    let replicates = a.common.replicates(1_000_000);
    let mut rows = Vec::new();
    for (i, &n) in a.sizes.iter().enumerate() {
        let stream = RandomStream::new(a.common.seed).cell(i as u64);
        let summary = t_sampling_distribution(
            &spec,
            n,
            replicates,
            stream,
            a.low,
            a.high,
            a.bins,
            a.common.workers,
        )?;
        if let Some(dir) = &a.histograms {
            std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
            let path = dir.join(format!("hist_n{n}.csv"));
            let f = File::create(&path).map_err(|e| LabError::io(&path, e))?;
            report::write_histogram(BufWriter::new(f), &summary.histogram)?;
        }
        rows.push((label.clone(), summary));
    }
    let out = open_output(a.common.output.as_deref())?;
    report::write_clt_summary(out, &rows, a.common.format.into())
}

fn moments_reference(a: MomentsReferenceArgs) -> Result<(), LabError> {
    a.common.validate()?;
    let replicates = a.common.replicates(engine::DEFAULT_REPLICATES);
    let mut rows = Vec::new();
    for (i, &kappa) in a.kappa.iter().enumerate() {
        let stream = RandomStream::new(a.common.seed).cell(i as u64);
        rows.push(symmetric_skewness_reference(
            kappa,
            a.family.into(),
            a.n,
            replicates,
            stream,
            a.common.workers,
        )?);
    }
    let out = open_output(a.common.output.as_deref())?;
    match OutputFormat::from(a.common.format) {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                rows: &'a [engine::SkewnessReference],
            }
            write_json(out, report::SKEWNESS_SCHEMA, &Body { rows: &rows })
        }
        OutputFormat::Csv => write_csv(
            out,
            report::SKEWNESS_SCHEMA,
            &[
                "kappa",
                "family",
                "n",
                "replicates",
                "mean",
                "sd",
                "q025",
                "q25",
                "q50",
                "q75",
                "q975",
            ],
            rows.iter().map(|r| {
                let mut v = vec![
                    r.kappa.to_string(),
                    r.family.name().to_string(),
                    r.n.to_string(),
                    r.replicates.to_string(),
                    sig6(r.mean),
                    sig6(r.sd),
                ];
                v.extend(r.quantiles.iter().map(|q| sig6(*q)));
                v
            }),
        ),
    }
}

fn diagnose_cmd(a: DiagnoseArgs) -> Result<(), LabError> {
    a.common.validate()?;
    if a.n == 0 || a.repeats == 0 {
        return Err(LabError::Config("--n and --repeats must be >= 1".into()));
    }
    let format = match a.input_format.as_deref() {
        Some(s) => InputFormat::parse(s).expect("restricted by clap"),
        None => InputFormat::from_path(&a.input),
    };
    let matrix = load_score_matrix(&a.input, format)?;
    let pairs = paired_differences(&matrix)?;
    let options = DiagnoseOptions {
        asymmetry_threshold: a.threshold,
        wilcoxon: a.wilcoxon.options(),
        ..DiagnoseOptions::default()
    };
    let mut rows = Vec::new();
    for (i, pair) in pairs.iter().enumerate() {
        for rep in 0..a.repeats {
            let stream = RandomStream::new(a.common.seed)
                .cell(i as u64)
                .replicate(rep);
            let (sample, mode) = resample_to_n(&pair.sample, a.n, stream)?;
            let mut row = DiagnoseRow {
                pair: format!("{}-{}", pair.a, pair.b),
                repeat: rep,
                topics: pair.sample.len(),
                n: sample.len(),
                mode: mode.name().to_string(),
                skewness: None,
                excess_kurtosis: None,
                t_p: None,
                wilcoxon_p: None,
                wilcoxon_method: None,
                flag: String::new(),
            };
            match diagnose(&sample, a.common.alpha, &options) {
                Ok(d) => {
                    row.skewness = Some(d.moments.skewness);
                    row.excess_kurtosis = Some(d.moments.excess_kurtosis);
                    row.t_p = Some(d.t.p_value);
                    row.wilcoxon_p = Some(d.wilcoxon.p_value);
                    row.wilcoxon_method = Some(d.wilcoxon.method.name().to_string());
                    row.flag = if d.asymmetry_flag { "asymmetric" } else { "" }.to_string();
                }
                Err(pairsig_core::Error::DegenerateSample(_)) => row.flag = "degenerate".into(),
                Err(e) => return Err(e.into()),
            }
            rows.push(row);
        }
    }
    let out = open_output(a.common.output.as_deref())?;
    match OutputFormat::from(a.common.format) {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                metric: &'a str,
                caution: &'a str,
                rows: &'a [DiagnoseRow],
            }
            write_json(
                out,
                report::DIAGNOSE_SCHEMA,
                &Body {
                    metric: &matrix.metric,
                    caution: pairsig_core::diagnostics::ASYMMETRY_CAUTION,
                    rows: &rows,
                },
            )
        }
        OutputFormat::Csv => {
            let opt = |v: Option<f64>| v.map(sig6).unwrap_or_default();
            write_csv(
                out,
                report::DIAGNOSE_SCHEMA,
                &[
                    "pair",
                    "repeat",
                    "topics",
                    "n",
                    "mode",
                    "skewness",
                    "excess_kurtosis",
                    "t_p",
                    "wilcoxon_p",
                    "wilcoxon_method",
                    "flag",
                ],
                rows.iter().map(|r| {
                    vec![
                        r.pair.clone(),
                        r.repeat.to_string(),
                        r.topics.to_string(),
                        r.n.to_string(),
                        r.mode.clone(),
                        opt(r.skewness),
                        opt(r.excess_kurtosis),
                        opt(r.t_p),
                        opt(r.wilcoxon_p),
                        r.wilcoxon_method.clone().unwrap_or_default(),
                        r.flag.clone(),
                    ]
                }),
            )
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct DiagnoseRow {
    pair: String,
    repeat: u64,
    topics: usize,
    n: usize,
    mode: String,
    skewness: Option<f64>,
    excess_kurtosis: Option<f64>,
    t_p: Option<f64>,
    wilcoxon_p: Option<f64>,
    wilcoxon_method: Option<String>,
    flag: String,
}

fn calibrate(a: CalibrateArgs) -> Result<(), LabError> {
    a.common.validate()?;
    let grid = DepartureGrid::default();
    let options = a.grid_options.cell_options();
    let dims: Vec<Dimension> = match a.dimension {
        DimensionArg::All => Dimension::ALL.to_vec(),
        DimensionArg::Asymmetric => vec![Dimension::Asymmetry],
        DimensionArg::Heavy => vec![Dimension::HeavyTails],
        DimensionArg::Light => vec![Dimension::LightTails],
        DimensionArg::Discrete => vec![Dimension::Discreteness],
    };
    let mut rows = Vec::new();
    for d in dims {
        for level in calibrate_dimension(&grid, d, &options)? {
            rows.push(report::calibration_row(&level)?);
        }
    }
    let out = open_output(a.common.output.as_deref())?;
    report::write_calibration(out, &rows, a.common.format.into())
}

fn support(a: SupportArgs) -> Result<(), LabError> {
    a.common.validate()?;
    let s = ibb_support(a.metric.into(), a.k)?;
    let out = open_output(a.common.output.as_deref())?;
    match OutputFormat::from(a.common.format) {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                metric: &'a str,
                k: u32,
                size: usize,
                values: &'a [f64],
            }
            write_json(
                out,
                report::SUPPORT_SCHEMA,
                &Body {
                    metric: s.metric.short_name(),
                    k: s.k,
                    size: s.len(),
                    values: s.values(),
                },
            )
        }
        OutputFormat::Csv => write_csv(
            out,
            report::SUPPORT_SCHEMA,
            &["index", "value"],
            s.values()
                .iter()
                .enumerate()
                .map(|(i, v)| vec![i.to_string(), v.to_string()]),
        ),
    }
}
