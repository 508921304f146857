//! Plain-text `key = value` description of a [`DistributionSpec`].
//!
//! ```text
//! # comments and blank lines are ignored
//! family = tgh          # normal | sgn | agn | tgh | ibb | bimodal
//! g = 0.5
//! h = 0
//! loc = 0
//! scale = 0.22
//! ```
//!
//! Keys per family:
//!
//! | family  | shape keys                     | calibrating keys   |
//! |---------|--------------------------------|--------------------|
//! | normal  |                                |                    |
//! | sgn     | `beta` (`inf` for uniform)     | `target_kurtosis`  |
//! | agn     | `xi`, `nu`                     | `target_skewness`  |
//! | tgh     | `g`, `h`                       | `target_skewness`, `target_kurtosis` |
//! | ibb     | `metric` (`p`/`rr`), `k`, `p`  | `target_sd`        |
//! | bimodal | `separation`                   |                    |
//!
//! `loc` (default 0) and `scale` (default 1) apply to every family except
//! `ibb`. A calibrating key replaces the shape keys and yields a spec with
//! mean 0 and sd 0.22 (or the IBB target sd) before `loc`/`scale` are applied;
//! when they are given explicitly they override the calibrated values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pairsig_core::calibration::{
    calibrate_ibb, calibrate_skewness, calibrate_tails, IbbRangePolicy,
};
use pairsig_core::distributions::{ibb_support, DistributionSpec, Family, Metric, Shape};

use crate::LabError;

const KNOWN_KEYS: [&str; 16] = [
    "family",
    "loc",
    "scale",
    "beta",
    "xi",
    "nu",
    "g",
    "h",
    "metric",
    "k",
    "p",
    "separation",
    "target_skewness",
    "target_kurtosis",
    "target_sd",
    "clamp",
];

fn parse_pairs(text: &str) -> Result<BTreeMap<String, (String, usize)>, LabError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| LabError::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got {line:?}"),
        })?;
        let key = key.trim().to_ascii_lowercase();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(LabError::Parse {
                line: i + 1,
                message: format!("unknown key {key:?}"),
            });
        }
        if map
            .insert(key.clone(), (value.trim().to_string(), i + 1))
            .is_some()
        {
            return Err(LabError::Parse {
                line: i + 1,
                message: format!("duplicate key {key:?}"),
            });
        }
    }
    Ok(map)
}

struct Fields(BTreeMap<String, (String, usize)>);

impl Fields {
    fn number(&self, key: &str) -> Result<Option<f64>, LabError> {
        match self.0.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| LabError::Parse {
                line: *line,
                message: format!("{key}: not a number: {v:?}"),
            }),
        }
    }

    fn required(&self, key: &str, family: &str) -> Result<f64, LabError> {
        self.number(key)?
            .ok_or_else(|| LabError::Config(format!("family {family} needs key {key:?}")))
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn only(&self, allowed: &[&str], family: &str) -> Result<(), LabError> {
        for (key, (_, line)) in &self.0 {
            if !allowed.contains(&key.as_str())
                && !matches!(key.as_str(), "family" | "loc" | "scale")
            {
                return Err(LabError::Parse {
                    line: *line,
                    message: format!("key {key:?} does not apply to family {family}"),
                });
            }
        }
        Ok(())
    }
}

/// Parses a spec file.
pub fn parse_spec(text: &str) -> Result<DistributionSpec, LabError> {
    let fields = Fields(parse_pairs(text)?);
    let family_name = fields
        .0
        .get("family")
        .map(|(v, _)| v.clone())
        .ok_or_else(|| LabError::Config("missing key \"family\"".into()))?;
    let family = Family::parse(&family_name)
        .ok_or_else(|| LabError::Config(format!("unknown family {family_name:?}")))?;
    let f = family.name();
    let calibrated = |mut spec: DistributionSpec| -> Result<DistributionSpec, LabError> {
        if let Some(loc) = fields.number("loc")? {
            spec.loc = loc;
        }
        if let Some(scale) = fields.number("scale")? {
            spec.scale = scale;
        }
        spec.validate()?;
        Ok(spec)
    };
    let shape = match family {
        Family::Normal => {
            fields.only(&[], f)?;
            Shape::Normal
        }
        Family::Sgn => {
            fields.only(&["beta", "target_kurtosis"], f)?;
            if let Some(kappa) = fields.number("target_kurtosis")? {
                return calibrated(calibrate_tails(family, kappa)?);
            }
            Shape::Sgn {
                beta: fields.required("beta", f)?,
            }
        }
        Family::Agn => {
            fields.only(&["xi", "nu", "target_skewness"], f)?;
            if let Some(gamma) = fields.number("target_skewness")? {
                return calibrated(calibrate_skewness(family, gamma)?);
            }
            Shape::Agn {
                xi: fields.required("xi", f)?,
                nu: fields.number("nu")?.unwrap_or(2.0),
            }
        }
        Family::Tgh => {
            fields.only(&["g", "h", "target_skewness", "target_kurtosis"], f)?;
            match (
                fields.number("target_skewness")?,
                fields.number("target_kurtosis")?,
            ) {
                (Some(_), Some(_)) => {
                    return Err(LabError::Config(
                        "give either target_skewness or target_kurtosis, not both".into(),
                    ))
                }
                (Some(gamma), None) => return calibrated(calibrate_skewness(family, gamma)?),
                (None, Some(kappa)) => return calibrated(calibrate_tails(family, kappa)?),
                (None, None) => Shape::Tgh {
                    g: fields.number("g")?.unwrap_or(0.0),
                    h: fields.number("h")?.unwrap_or(0.0),
                },
            }
        }
        Family::Ibb => {
            fields.only(&["metric", "k", "p", "target_sd", "clamp"], f)?;
            if fields.has("loc") || fields.has("scale") {
                return Err(LabError::Config(
                    "ibb draws come straight from the metric support; loc/scale are not accepted"
                        .into(),
                ));
            }
            let metric_name = fields
                .0
                .get("metric")
                .map(|(v, _)| v.clone())
                .ok_or_else(|| LabError::Config("family ibb needs key \"metric\"".into()))?;
            let metric = Metric::parse(&metric_name)
                .ok_or_else(|| LabError::Config(format!("unknown metric {metric_name:?}")))?;
            let k = fields.required("k", f)?;
            if !(k >= 1.0 && k.fract() == 0.0 && k <= u32::MAX as f64) {
                return Err(LabError::Config(format!(
                    "k must be a positive integer, got {k}"
                )));
            }
            let support = ibb_support(metric, k as u32)?;
            if let Some(sd) = fields.number("target_sd")? {
                let policy = match fields.0.get("clamp").map(|(v, _)| v.as_str()) {
                    None | Some("false") | Some("no") => IbbRangePolicy::Error,
                    Some("true") | Some("yes") => IbbRangePolicy::Clamp,
                    Some(other) => {
                        return Err(LabError::Config(format!(
                            "clamp: expected true/false, got {other:?}"
                        )))
                    }
                };
                return Ok(calibrate_ibb(&support, sd, policy)?);
            }
            let p = fields.required("p", f)?;
            return Ok(DistributionSpec::new(Shape::Ibb { support, p }, 0.0, 1.0)?);
        }
        Family::BimodalMixture => {
            fields.only(&["separation"], f)?;
            Shape::BimodalMixture {
                separation: fields.required("separation", f)?,
            }
        }
    };
    Ok(DistributionSpec::new(
        shape,
        fields.number("loc")?.unwrap_or(0.0),
        fields.number("scale")?.unwrap_or(1.0),
    )?)
}

/// Renders a spec in the format read by [`parse_spec`]. Parameters are written
/// with full precision, so parsing the output yields the same spec.
pub fn format_spec(spec: &DistributionSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "family = {}", spec.family().name());
    match &spec.shape {
        Shape::Normal => {}
        Shape::Sgn { beta } => {
            let _ = writeln!(out, "beta = {beta}");
        }
        Shape::Agn { xi, nu } => {
            let _ = writeln!(out, "xi = {xi}\nnu = {nu}");
        }
        Shape::Tgh { g, h } => {
            let _ = writeln!(out, "g = {g}\nh = {h}");
        }
        Shape::Ibb { support, p } => {
            let _ = writeln!(
                out,
                "metric = {}\nk = {}\np = {p}",
                support.metric.short_name(),
                support.k
            );
            return out;
        }
        Shape::BimodalMixture { separation } => {
            let _ = writeln!(out, "separation = {separation}");
        }
    }
    let _ = writeln!(out, "loc = {}\nscale = {}", spec.loc, spec.scale);
    out
}
