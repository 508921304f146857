//! Solving family shape parameters for target skewness, kurtosis and
//! standard deviation, and the grids of departure levels.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::distributions::{
    agn_moments, ibb_sd, ibb_support, sgn_excess_kurtosis, tgh_moments, DistributionSpec, Family,
    Metric, MetricSupport, Shape,
};
use crate::{Error, Result};

/// Standard deviation every calibrated spec is scaled to.
pub const SIGMA_D: f64 = 0.22;

/// Final bracket width of the bisection (in the solved coordinate).
pub const BRACKET_WIDTH: f64 = 1e-10;

const MONOTONE_POINTS: usize = 100;

/// Largest asymmetry parameter before the AGN path switches to the tail parameter.
pub const AGN_XI_MAX: f64 = 3.0;
const AGN_NU_BASE: f64 = 2.0;
const AGN_NU_MIN: f64 = 0.3;
const TGH_G_MAX: f64 = 2.0;
const TGH_H_MAX: f64 = 0.25;
const SGN_BETA_MIN: f64 = 0.25;
const SGN_BETA_MAX: f64 = 1e4;
const IBB_P_MIN: f64 = 1e-4;
const IBB_P_MAX: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Dimension {
    Asymmetry,
    HeavyTails,
    LightTails,
    Discreteness,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Asymmetry,
        Dimension::HeavyTails,
        Dimension::LightTails,
        Dimension::Discreteness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Asymmetry => "asymmetric",
            Dimension::HeavyTails => "heavy",
            Dimension::LightTails => "light",
            Dimension::Discreteness => "discrete",
        }
    }

    /// Name of the moment (or cutoff) the levels refer to.
    pub fn target_name(self) -> &'static str {
        match self {
            Dimension::Asymmetry => "skewness",
            Dimension::HeavyTails | Dimension::LightTails => "excess_kurtosis",
            Dimension::Discreteness => "k",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "asymmetric" | "asymmetry" => Some(Dimension::Asymmetry),
            "heavy" | "heavy-tails" => Some(Dimension::HeavyTails),
            "light" | "light-tails" => Some(Dimension::LightTails),
            "discrete" | "discreteness" => Some(Dimension::Discreteness),
            _ => None,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Levels of departure shared by every dimension.
pub const LEVEL_LABELS: [&str; 6] = ["Low", "Med.", "High", "Very H.", "Extr. H.", "Patho. H."];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DepartureGrid {
    pub asymmetry: [f64; 6],
    pub heavy_tails: [f64; 6],
    pub light_tails: [f64; 6],
    pub discreteness: [u32; 6],
    pub labels: [&'static str; 6],
}

impl Default for DepartureGrid {
    fn default() -> Self {
        Self {
            asymmetry: [0.25, 0.5, 1.0, 1.5, 3.0, 5.0],
            heavy_tails: [0.5, 1.5, 3.0, 5.0, 15.0, 30.0],
            light_tails: [-0.2, -0.4, -0.7, -0.9, -1.1, -1.2],
            discreteness: [1000, 500, 100, 50, 10, 5],
            labels: LEVEL_LABELS,
        }
    }
}

impl DepartureGrid {
    /// Target values of a dimension as reals (`k` for discreteness).
    pub fn targets(&self, dimension: Dimension) -> [f64; 6] {
        match dimension {
            Dimension::Asymmetry => self.asymmetry,
            Dimension::HeavyTails => self.heavy_tails,
            Dimension::LightTails => self.light_tails,
            Dimension::Discreteness => self.discreteness.map(f64::from),
        }
    }
}

/// Bisection for `f(x) = target` on `[lo, hi]` after checking that `f` is
/// strictly monotone on an evenly spaced grid over the bracket.
pub fn bisect<F>(f: F, lo: f64, hi: f64, target: f64, what: &str, width: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut values = Vec::with_capacity(MONOTONE_POINTS);
    for i in 0..MONOTONE_POINTS {
        let x = lo + (hi - lo) * i as f64 / (MONOTONE_POINTS - 1) as f64;
        values.push(f(x)?);
    }
    let increasing = values[MONOTONE_POINTS - 1] > values[0];
    for (i, w) in values.windows(2).enumerate() {
        let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
        if !ok {
            let x = lo + (hi - lo) * (i + 1) as f64 / (MONOTONE_POINTS - 1) as f64;
            return Err(Error::NonMonotone(format!(
                "{what}: objective not monotone near {x} ({} then {})",
                w[0], w[1]
            )));
        }
    }
    let (f_lo, f_hi) = (values[0], values[MONOTONE_POINTS - 1]);
    let (low, high) = if increasing {
        (f_lo, f_hi)
    } else {
        (f_hi, f_lo)
    };
    if !(target >= low && target <= high) {
        return Err(Error::CalibrationRange {
            what: String::from(what),
            target,
            low,
            high,
        });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > width {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let below = f(mid)? < target;
        if below == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

fn standardized(shape: Shape) -> Result<DistributionSpec> {
    DistributionSpec::new(shape, 0.0, SIGMA_D)
}

/// Skewness of the AGN path used for calibration: `ξ` in `[1, 3]` at `ν = 2`,
/// then `ξ = 3` with `ν` decreasing from 2.
pub fn agn_path_skewness(t: f64) -> Result<f64> {
    let (xi, nu) = agn_path_point(t);
    Ok(agn_moments(xi, nu)?.0)
}

/// Parameters of the AGN calibration path at coordinate `t >= 0`:
/// `t <= 2` moves `ξ` from 1 to 3; `t > 2` lowers `ν` from 2 by `t - 2`.
pub fn agn_path_point(t: f64) -> (f64, f64) {
    let xi_span = AGN_XI_MAX - 1.0;
    if t <= xi_span {
        (1.0 + t, AGN_NU_BASE)
    } else {
        (AGN_XI_MAX, AGN_NU_BASE - (t - xi_span))
    }
}

/// Spec with theoretical skewness `target_gamma`, mean 0 and sd 0.22.
///
/// AGN follows [`agn_path_point`]; TGH uses `h = 0` and solves for `g`.
/// Negative targets are the reflection of the positive solution.
pub fn calibrate_skewness(family: Family, target_gamma: f64) -> Result<DistributionSpec> {
    if !target_gamma.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "target skewness must be finite, got {target_gamma}"
        )));
    }
    if target_gamma < 0.0 {
        return Ok(calibrate_skewness(family, -target_gamma)?.reflected());
    }
    match family {
        Family::Agn => {
            if target_gamma == 0.0 {
                return standardized(Shape::Agn {
                    xi: 1.0,
                    nu: AGN_NU_BASE,
                });
            }
            let xi_span = AGN_XI_MAX - 1.0;
            let edge = agn_path_skewness(xi_span)?;
            let t = if target_gamma <= edge {
                bisect(
                    agn_path_skewness,
                    0.0,
                    xi_span,
                    target_gamma,
                    "AGN skewness",
                    BRACKET_WIDTH,
                )?
            } else {
                bisect(
                    agn_path_skewness,
                    xi_span,
                    xi_span + (AGN_NU_BASE - AGN_NU_MIN),
                    target_gamma,
                    "AGN skewness",
                    BRACKET_WIDTH,
                )?
            };
            let (xi, nu) = agn_path_point(t);
            standardized(Shape::Agn { xi, nu })
        }
        Family::Tgh => {
            if target_gamma == 0.0 {
                return standardized(Shape::Tgh { g: 0.0, h: 0.0 });
            }
            let g = bisect(
                |g| Ok(tgh_moments(g, 0.0)?.0),
                0.0,
                TGH_G_MAX,
                target_gamma,
                "TGH skewness",
                BRACKET_WIDTH,
            )?;
            standardized(Shape::Tgh { g, h: 0.0 })
        }
        other => Err(Error::ParameterDomain(format!(
            "skewness calibration needs AGN or TGH, got {other}"
        ))),
    }
}

/// Symmetric spec with theoretical excess kurtosis `target_kappa`, mean 0 and
/// sd 0.22. SGN covers `(-1.2, inf)` with `-1.2` mapped to the uniform;
/// TGH (`g = 0`) covers `[0, inf)` with `h < 1/4`.
pub fn calibrate_tails(family: Family, target_kappa: f64) -> Result<DistributionSpec> {
    if !target_kappa.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "target kurtosis must be finite, got {target_kappa}"
        )));
    }
    match family {
        Family::Sgn => {
            if target_kappa == 0.0 {
                return standardized(Shape::Sgn { beta: 2.0 });
            }
            if target_kappa == 3.0 {
                return standardized(Shape::Sgn { beta: 1.0 });
            }
            if target_kappa == -1.2 {
                return standardized(Shape::Sgn {
                    beta: f64::INFINITY,
                });
            }
            let ln_beta = bisect(
                |u| sgn_excess_kurtosis(libm::exp(u)),
                libm::log(SGN_BETA_MIN),
                libm::log(SGN_BETA_MAX),
                target_kappa,
                "SGN excess kurtosis",
                BRACKET_WIDTH,
            )?;
            standardized(Shape::Sgn {
                beta: libm::exp(ln_beta),
            })
        }
        Family::Tgh => {
            if target_kappa == 0.0 {
                return standardized(Shape::Tgh { g: 0.0, h: 0.0 });
            }
            let h = bisect(
                |h| Ok(tgh_moments(0.0, h)?.1),
                0.0,
                TGH_H_MAX * (1.0 - 1e-9),
                target_kappa,
                "TGH excess kurtosis",
                BRACKET_WIDTH,
            )?;
            standardized(Shape::Tgh { g: 0.0, h })
        }
        other => Err(Error::ParameterDomain(format!(
            "tail calibration needs SGN or TGH, got {other}"
        ))),
    }
}

/// What [`calibrate_ibb`] does when the target sd is out of reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum IbbRangePolicy {
    #[default]
    Error,
    /// Use the bracket end whose sd is nearest the target.
    Clamp,
}

/// Smallest and largest pmf sd reachable over the search bracket of `p`.
pub fn ibb_sd_range(support: &MetricSupport) -> Result<(f64, f64)> {
    Ok((ibb_sd(support, IBB_P_MAX)?, ibb_sd(support, IBB_P_MIN)?))
}

/// IBB spec on `support` whose exact pmf sd equals `target_sd`, solved by
/// bisection on `ln p`.
pub fn calibrate_ibb(
    support: &MetricSupport,
    target_sd: f64,
    policy: IbbRangePolicy,
) -> Result<DistributionSpec> {
    support.validate()?;
    let what = format!("IBB sd on {}@{}", support.metric.short_name(), support.k);
    let (low, high) = ibb_sd_range(support)?;
    if !(target_sd > 0.0) || !target_sd.is_finite() {
        return Err(Error::CalibrationRange {
            what,
            target: target_sd,
            low,
            high,
        });
    }
    let p = if target_sd < low || target_sd > high {
        match policy {
            IbbRangePolicy::Error => {
                return Err(Error::CalibrationRange {
                    what,
                    target: target_sd,
                    low,
                    high,
                })
            }
            IbbRangePolicy::Clamp if target_sd < low => IBB_P_MAX,
            IbbRangePolicy::Clamp => IBB_P_MIN,
        }
    } else {
        let ln_p = bisect(
            |u| ibb_sd(support, libm::exp(u)),
            libm::log(IBB_P_MIN),
            libm::log(IBB_P_MAX),
            target_sd,
            &what,
            1e-13,
        )?;
        libm::exp(ln_p)
    };
    DistributionSpec::new(
        Shape::Ibb {
            support: support.clone(),
            p,
        },
        0.0,
        1.0,
    )
}

/// Same shape with the affine map set so the mean is `mean` and the sd is `sd`.
pub fn standardize(spec: &DistributionSpec, mean: f64, sd: f64) -> Result<DistributionSpec> {
    if let Shape::Ibb { .. } = spec.shape {
        return Err(Error::AffineExempt);
    }
    let base = spec.base_moments()?;
    if !(base.variance > 0.0) {
        return Err(Error::DegenerateSample("spec has zero variance"));
    }
    DistributionSpec::new(spec.shape.clone(), mean, sd)
}

/// Named shape parameters, for reports.
pub fn shape_parameters(shape: &Shape) -> Vec<(&'static str, f64)> {
    match shape {
        Shape::Normal => Vec::new(),
        Shape::Sgn { beta } => alloc::vec![("beta", *beta)],
        Shape::Agn { xi, nu } => alloc::vec![("xi", *xi), ("nu", *nu)],
        Shape::Tgh { g, h } => alloc::vec![("g", *g), ("h", *h)],
        Shape::Ibb { support, p } => {
            alloc::vec![
                ("k", f64::from(support.k)),
                ("support_size", support.len() as f64),
                ("p", *p)
            ]
        }
        Shape::BimodalMixture { separation } => alloc::vec![("separation", *separation)],
    }
}

/// One way of generating a departure: a continuous family, or the IBB on
/// one metric's support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mechanism {
    Family(Family),
    Ibb(Metric),
}

impl Mechanism {
    pub fn family(self) -> Family {
        match self {
            Mechanism::Family(f) => f,
            Mechanism::Ibb(_) => Family::Ibb,
        }
    }

    /// `agn`, `sgn`, ... or `ibb-p` / `ibb-rr`.
    pub fn tag(self) -> String {
        match self {
            Mechanism::Family(f) => String::from(f.name()),
            Mechanism::Ibb(m) => format!("ibb-{}", m.short_name()),
        }
    }

    /// Small distinct index, used to build stream ids.
    pub fn index(self) -> u32 {
        match self {
            Mechanism::Family(Family::Normal) => 0,
            Mechanism::Family(Family::Sgn) => 1,
            Mechanism::Family(Family::Agn) => 2,
            Mechanism::Family(Family::Tgh) => 3,
            Mechanism::Ibb(Metric::PrecisionAtK) => 4,
            Mechanism::Ibb(Metric::ReciprocalRankAtK) => 5,
            Mechanism::Family(Family::BimodalMixture) => 6,
            // an IBB without a metric cannot be calibrated
            Mechanism::Family(Family::Ibb) => 5,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let Some(metric) = s.strip_prefix("ibb-") {
            return Metric::parse(metric).map(Mechanism::Ibb);
        }
        match Family::parse(&s)? {
            Family::Ibb => None,
            f => Some(Mechanism::Family(f)),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Mechanisms simulated as a single cell. Replicate `r` of a pooled cell
/// draws from mechanism `r mod len`.
pub type Pool = Vec<Mechanism>;

/// `agn+tgh`.
pub fn pool_tag(pool: &[Mechanism]) -> String {
    pool.iter().map(|m| m.tag()).collect::<Vec<_>>().join("+")
}

/// Bit set of the mechanism indices.
pub fn pool_mask(pool: &[Mechanism]) -> u64 {
    pool.iter().fold(0, |acc, m| acc | 1 << m.index())
}

/// Mechanism pools simulated for each dimension.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellOptions {
    pub asymmetric: Vec<Pool>,
    pub heavy: Vec<Pool>,
    pub light: Vec<Pool>,
    pub discrete: Vec<Pool>,
    pub ibb_target_sd: f64,
    pub ibb_policy: IbbRangePolicy,
}

impl Default for CellOptions {
    /// Asymmetry: AGN, TGH and the two pooled. Heavy tails: SGN and TGH
    /// pooled. Light tails: SGN. Discreteness: P@k and RR@k pooled, with P@k
    /// clamped where 0.22 is out of its reach.
    fn default() -> Self {
        use Mechanism::{Family as F, Ibb};
        Self {
            asymmetric: alloc::vec![
                alloc::vec![F(Family::Agn)],
                alloc::vec![F(Family::Tgh)],
                alloc::vec![F(Family::Agn), F(Family::Tgh)],
            ],
            heavy: alloc::vec![alloc::vec![F(Family::Sgn), F(Family::Tgh)]],
            light: alloc::vec![alloc::vec![F(Family::Sgn)]],
            discrete: alloc::vec![alloc::vec![
                Ibb(Metric::PrecisionAtK),
                Ibb(Metric::ReciprocalRankAtK)
            ]],
            ibb_target_sd: SIGMA_D,
            ibb_policy: IbbRangePolicy::Clamp,
        }
    }
}

impl CellOptions {
    pub fn pools(&self, dimension: Dimension) -> &[Pool] {
        match dimension {
            Dimension::Asymmetry => &self.asymmetric,
            Dimension::HeavyTails => &self.heavy,
            Dimension::LightTails => &self.light,
            Dimension::Discreteness => &self.discrete,
        }
    }

    pub fn pools_mut(&mut self, dimension: Dimension) -> &mut Vec<Pool> {
        match dimension {
            Dimension::Asymmetry => &mut self.asymmetric,
            Dimension::HeavyTails => &mut self.heavy,
            Dimension::LightTails => &mut self.light,
            Dimension::Discreteness => &mut self.discrete,
        }
    }
}

/// One calibrated level of one dimension.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CalibratedLevel {
    pub dimension: Dimension,
    pub level: usize,
    pub label: &'static str,
    pub target: f64,
    pub mechanism: Mechanism,
    pub spec: DistributionSpec,
}

impl CalibratedLevel {
    pub fn family(&self) -> Family {
        self.mechanism.family()
    }

    /// The achieved value of the calibrated quantity (skewness, kurtosis or sd).
    pub fn achieved(&self) -> Result<f64> {
        let m = self.spec.theoretical_moments()?;
        Ok(match self.dimension {
            Dimension::Asymmetry => m.skewness,
            Dimension::HeavyTails | Dimension::LightTails => m.excess_kurtosis,
            Dimension::Discreteness => m.sd,
        })
    }
}

/// A level simulated as one cell over one or more calibrated mechanisms.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PooledLevel {
    pub dimension: Dimension,
    pub level: usize,
    pub label: &'static str,
    pub target: f64,
    pub components: Vec<CalibratedLevel>,
}

impl PooledLevel {
    pub fn mechanisms(&self) -> Vec<Mechanism> {
        self.components.iter().map(|c| c.mechanism).collect()
    }

    pub fn tag(&self) -> String {
        pool_tag(&self.mechanisms())
    }
}

fn with_level(err: Error, dimension: Dimension, label: &str, mechanism: Mechanism) -> Error {
    match err {
        Error::CalibrationRange {
            what,
            target,
            low,
            high,
        } => Error::CalibrationRange {
            what: format!("{dimension}/{label}/{mechanism}: {what}"),
            target,
            low,
            high,
        },
        Error::NonMonotone(msg) => {
            Error::NonMonotone(format!("{dimension}/{label}/{mechanism}: {msg}"))
        }
        other => other,
    }
}

/// Calibrates a single level.
pub fn calibrate_level(
    grid: &DepartureGrid,
    dimension: Dimension,
    level: usize,
    mechanism: Mechanism,
    options: &CellOptions,
) -> Result<CalibratedLevel> {
    let label = grid.labels[level];
    let target = grid.targets(dimension)[level];
    let spec = match (dimension, mechanism) {
        (Dimension::Asymmetry, Mechanism::Family(f)) => calibrate_skewness(f, target),
        (Dimension::HeavyTails | Dimension::LightTails, Mechanism::Family(f)) => {
            calibrate_tails(f, target)
        }
        (Dimension::Discreteness, Mechanism::Ibb(metric)) => {
            ibb_support(metric, grid.discreteness[level])
                .and_then(|s| calibrate_ibb(&s, options.ibb_target_sd, options.ibb_policy))
        }
        _ => Err(Error::ParameterDomain(format!(
            "mechanism {mechanism} does not apply to dimension {dimension}"
        ))),
    }
    .map_err(|e| with_level(e, dimension, label, mechanism))?;
    Ok(CalibratedLevel {
        dimension,
        level,
        label,
        target,
        mechanism,
        spec,
    })
}

/// Distinct mechanisms used by `dimension` under `options`, in first-use order.
pub fn dimension_mechanisms(dimension: Dimension, options: &CellOptions) -> Vec<Mechanism> {
    let mut out: Vec<Mechanism> = Vec::new();
    for m in options.pools(dimension).iter().flatten() {
        if !out.contains(m) {
            out.push(*m);
        }
    }
    out
}

/// Every level of every distinct mechanism of a dimension, mechanism-major.
pub fn calibrate_dimension(
    grid: &DepartureGrid,
    dimension: Dimension,
    options: &CellOptions,
) -> Result<Vec<CalibratedLevel>> {
    let mut out = Vec::new();
    for mechanism in dimension_mechanisms(dimension, options) {
        for level in 0..grid.labels.len() {
            out.push(calibrate_level(grid, dimension, level, mechanism, options)?);
        }
    }
    Ok(out)
}

/// The simulated cells of a dimension, pool-major.
pub fn calibrate_pools(
    grid: &DepartureGrid,
    dimension: Dimension,
    options: &CellOptions,
) -> Result<Vec<PooledLevel>> {
    let levels = calibrate_dimension(grid, dimension, options)?;
    let mut out = Vec::new();
    for pool in options.pools(dimension) {
        if pool.is_empty() {
            return Err(Error::ParameterDomain(format!(
                "empty mechanism pool for {dimension}"
            )));
        }
        for level in 0..grid.labels.len() {
            let components = pool
                .iter()
                .map(|m| {
                    levels
                        .iter()
                        .find(|c| c.mechanism == *m && c.level == level)
                        .cloned()
                        .expect("calibrated above")
                })
                .collect();
            out.push(PooledLevel {
                dimension,
                level,
                label: grid.labels[level],
                target: grid.targets(dimension)[level],
                components,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_levels() {
        let g = DepartureGrid::default();
        assert_eq!(g.targets(Dimension::Discreteness)[5], 5.0);
        assert_eq!(g.labels[0], "Low");
        assert_eq!(g.labels[5], "Patho. H.");
    }

    #[test]
    fn trivial_targets() {
        let s = calibrate_skewness(Family::Agn, 0.0).unwrap();
        assert_eq!(s.shape, Shape::Agn { xi: 1.0, nu: 2.0 });
        let s = calibrate_skewness(Family::Tgh, 0.0).unwrap();
        assert_eq!(s.shape, Shape::Tgh { g: 0.0, h: 0.0 });
        let s = calibrate_tails(Family::Sgn, 0.0).unwrap();
        assert_eq!(s.shape, Shape::Sgn { beta: 2.0 });
        let s = calibrate_tails(Family::Sgn, 3.0).unwrap();
        assert_eq!(s.shape, Shape::Sgn { beta: 1.0 });
        let s = calibrate_tails(Family::Sgn, -1.2).unwrap();
        assert_eq!(
            s.shape,
            Shape::Sgn {
                beta: f64::INFINITY
            }
        );
        assert_eq!(s.scale, SIGMA_D);
    }

    #[test]
    fn negative_skewness_is_reflection() {
        for family in [Family::Agn, Family::Tgh] {
            let pos = calibrate_skewness(family, 1.5).unwrap();
            let neg = calibrate_skewness(family, -1.5).unwrap();
            assert_eq!(neg, pos.reflected());
            let m = neg.theoretical_moments().unwrap();
            assert_abs_diff_eq!(m.skewness, -1.5, epsilon = 1e-6);
        }
    }

    #[test]
    fn out_of_range_targets() {
        assert!(matches!(
            calibrate_tails(Family::Sgn, -1.3),
            Err(Error::CalibrationRange { .. })
        ));
        assert!(matches!(
            calibrate_tails(Family::Tgh, -0.5),
            Err(Error::CalibrationRange { .. })
        ));
        assert!(calibrate_skewness(Family::Sgn, 1.0).is_err());
    }

    #[test]
    fn agn_path_is_continuous() {
        let a = agn_path_point(2.0);
        assert_eq!(a, (3.0, 2.0));
        assert_eq!(agn_path_point(2.5), (3.0, 1.5));
    }

    #[test]
    fn bisect_detects_non_monotone() {
        let r = bisect(
            |x| Ok((x - 0.5) * (x - 0.5)),
            0.0,
            1.0,
            0.1,
            "parabola",
            1e-10,
        );
        assert!(matches!(r, Err(Error::NonMonotone(_))));
    }

    #[test]
    fn standardize_cases() {
        let s = standardize(&DistributionSpec::standard_normal(), 0.0, SIGMA_D).unwrap();
        assert_eq!((s.loc, s.scale), (0.0, 0.22));
        assert_eq!(standardize(&s, 0.0, SIGMA_D).unwrap(), s);
        let support = ibb_support(Metric::PrecisionAtK, 10).unwrap();
        let ibb = DistributionSpec::unit(Shape::Ibb { support, p: 1.0 }).unwrap();
        assert!(matches!(
            standardize(&ibb, 0.0, 0.22),
            Err(Error::AffineExempt)
        ));
    }

    #[test]
    fn ibb_precision_at_ten_is_out_of_reach() {
        let support = ibb_support(Metric::PrecisionAtK, 10).unwrap();
        let (low, _) = ibb_sd_range(&support).unwrap();
        assert!(low > 0.2236 && low < 0.2237);
        assert!(matches!(
            calibrate_ibb(&support, SIGMA_D, IbbRangePolicy::Error),
            Err(Error::CalibrationRange { .. })
        ));
        let clamped = calibrate_ibb(&support, SIGMA_D, IbbRangePolicy::Clamp).unwrap();
        assert_abs_diff_eq!(
            clamped.theoretical_moments().unwrap().sd,
            low,
            epsilon = 1e-12
        );
        assert!(calibrate_ibb(&support, 0.0, IbbRangePolicy::Clamp).is_err());
    }

    #[test]
    fn default_pools() {
        let grid = DepartureGrid::default();
        let opts = CellOptions::default();
        let heavy = calibrate_pools(&grid, Dimension::HeavyTails, &opts).unwrap();
        assert_eq!(heavy.len(), 6);
        assert_eq!(heavy[0].tag(), "sgn+tgh");
        let asym = calibrate_pools(&grid, Dimension::Asymmetry, &opts).unwrap();
        let tags: Vec<_> = asym.iter().step_by(6).map(|p| p.tag()).collect();
        assert_eq!(tags, ["agn", "tgh", "agn+tgh"]);
        assert_eq!(asym[17].components[1], asym[11].components[0]);
        let discrete = calibrate_pools(&grid, Dimension::Discreteness, &opts).unwrap();
        assert_eq!(discrete[5].tag(), "ibb-p+ibb-rr");
    }

    #[test]
    fn mechanism_names() {
        for m in [
            Mechanism::Family(Family::Sgn),
            Mechanism::Family(Family::Agn),
            Mechanism::Family(Family::Tgh),
            Mechanism::Ibb(Metric::PrecisionAtK),
            Mechanism::Ibb(Metric::ReciprocalRankAtK),
        ] {
            assert_eq!(Mechanism::parse(&m.tag()), Some(m));
        }
        assert_eq!(Mechanism::parse("ibb"), None);
        let grid = DepartureGrid::default();
        let opts = CellOptions::default();
        assert!(calibrate_level(
            &grid,
            Dimension::Discreteness,
            0,
            Mechanism::Family(Family::Sgn),
            &opts
        )
        .is_err());
        assert!(calibrate_level(
            &grid,
            Dimension::LightTails,
            0,
            Mechanism::Family(Family::Tgh),
            &opts
        )
        .is_err());
    }
}
