//! CSV and JSON writers. Every CSV starts with a `# pairsig <kind> v<N>`
//! line; JSON documents carry the same tag in a `schema` field.

use std::io::Write;

use serde::Serialize;

use pairsig_core::calibration::{shape_parameters, CalibratedLevel};
use pairsig_core::montecarlo::Histogram;

use crate::engine::{SimulationReport, TDistributionSummary};
use crate::LabError;

pub const SIMULATION_SCHEMA: &str = "pairsig simulation v1";
pub const CALIBRATION_SCHEMA: &str = "pairsig calibration v1";
pub const HISTOGRAM_SCHEMA: &str = "pairsig histogram v1";
pub const CLT_SCHEMA: &str = "pairsig clt v1";
pub const SKEWNESS_SCHEMA: &str = "pairsig skewness-reference v1";
pub const DIAGNOSE_SCHEMA: &str = "pairsig diagnose v1";
pub const SUPPORT_SCHEMA: &str = "pairsig support v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

/// `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = 5 - exp;
    if (0..=12).contains(&decimals) {
        format!("{x:.prec$}", prec = decimals as usize)
    } else {
        format!("{x:.5e}")
    }
}

fn io(e: std::io::Error) -> LabError {
    LabError::io("<output>", e)
}

/// Writes a CSV document: schema line, header, rows.
pub fn write_csv<W: Write>(
    mut out: W,
    schema: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), LabError> {
    writeln!(out, "# {schema}").map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    schema: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_json<W: Write, T: Serialize>(
    mut out: W,
    schema: &str,
    body: &T,
) -> Result<(), LabError> {
    serde_json::to_writer_pretty(&mut out, &Tagged { schema, body })?;
    writeln!(out).map_err(io)?;
    Ok(())
}

fn target_text(t: f64) -> String {
    if t.is_nan() {
        String::new()
    } else {
        t.to_string()
    }
}

pub const SIMULATION_COLUMNS: [&str; 13] = [
    "grid",
    "family",
    "level",
    "target",
    "n",
    "test",
    "rate",
    "se",
    "replicates",
    "rejections",
    "degenerate",
    "seed",
    "cell",
];

pub fn write_simulation<W: Write>(
    out: W,
    report: &SimulationReport,
    format: OutputFormat,
) -> Result<(), LabError> {
    match format {
        OutputFormat::Json => write_json(out, SIMULATION_SCHEMA, report),
        OutputFormat::Csv => write_csv(
            out,
            SIMULATION_SCHEMA,
            &SIMULATION_COLUMNS,
            report.rows.iter().map(|r| {
                vec![
                    r.grid.clone(),
                    r.family.clone(),
                    r.level.clone(),
                    target_text(r.target),
                    r.n.to_string(),
                    r.test.clone(),
                    sig6(r.rate),
                    sig6(r.se),
                    r.replicates.to_string(),
                    r.rejections.to_string(),
                    r.degenerate.to_string(),
                    r.seed.to_string(),
                    r.cell.to_string(),
                ]
            }),
        ),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationRow {
    pub dimension: String,
    pub label: String,
    pub target: f64,
    pub family: String,
    pub parameters: Vec<(String, f64)>,
    pub achieved: f64,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn calibration_row(level: &CalibratedLevel) -> Result<CalibrationRow, LabError> {
    let m = level.spec.theoretical_moments()?;
    let mut parameters: Vec<(String, f64)> = shape_parameters(&level.spec.shape)
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    if level.family() != pairsig_core::distributions::Family::Ibb {
        parameters.push(("loc".into(), level.spec.loc));
        parameters.push(("scale".into(), level.spec.scale));
    }
    Ok(CalibrationRow {
        dimension: level.dimension.name().to_string(),
        label: level.label.to_string(),
        target: level.target,
        family: level.mechanism.tag(),
        parameters,
        achieved: level.achieved()?,
        mean: m.mean,
        sd: m.sd,
        skewness: m.skewness,
        excess_kurtosis: m.excess_kurtosis,
    })
}

pub fn write_calibration<W: Write>(
    out: W,
    rows: &[CalibrationRow],
    format: OutputFormat,
) -> Result<(), LabError> {
    #[derive(Serialize)]
    struct Body<'a> {
        rows: &'a [CalibrationRow],
    }
    match format {
        OutputFormat::Json => write_json(out, CALIBRATION_SCHEMA, &Body { rows }),
        OutputFormat::Csv => write_csv(
            out,
            CALIBRATION_SCHEMA,
            &[
                "dimension",
                "label",
                "target",
                "family",
                "parameters",
                "achieved",
                "mean",
                "sd",
                "skewness",
                "excess_kurtosis",
            ],
            rows.iter().map(|r| {
                let params = r
                    .parameters
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(";");
                vec![
                    r.dimension.clone(),
                    r.label.clone(),
                    r.target.to_string(),
                    r.family.clone(),
                    params,
                    r.achieved.to_string(),
                    r.mean.to_string(),
                    r.sd.to_string(),
                    r.skewness.to_string(),
                    r.excess_kurtosis.to_string(),
                ]
            }),
        ),
    }
}

/// `bin_left, bin_right, count` rows.
pub fn write_histogram<W: Write>(out: W, h: &Histogram) -> Result<(), LabError> {
    write_csv(
        out,
        HISTOGRAM_SCHEMA,
        &["bin_left", "bin_right", "count"],
        (0..h.counts.len()).map(|i| {
            let (l, r) = h.bin_edges(i);
            vec![l.to_string(), r.to_string(), h.counts[i].to_string()]
        }),
    )
}

pub fn write_clt_summary<W: Write>(
    out: W,
    rows: &[(String, TDistributionSummary)],
    format: OutputFormat,
) -> Result<(), LabError> {
    #[derive(Serialize)]
    struct Row<'a> {
        spec: &'a str,
        #[serde(flatten)]
        summary: &'a TDistributionSummary,
    }
    #[derive(Serialize)]
    struct Body<'a> {
        rows: Vec<Row<'a>>,
    }
    match format {
        OutputFormat::Json => write_json(
            out,
            CLT_SCHEMA,
            &Body {
                rows: rows
                    .iter()
                    .map(|(s, summary)| Row { spec: s, summary })
                    .collect(),
            },
        ),
        OutputFormat::Csv => write_csv(
            out,
            CLT_SCHEMA,
            &[
                "spec",
                "n",
                "replicates",
                "degenerate",
                "ks_distance",
                "lower_tail",
                "upper_tail",
            ],
            rows.iter().map(|(s, r)| {
                vec![
                    s.clone(),
                    r.n.to_string(),
                    r.replicates.to_string(),
                    r.degenerate.to_string(),
                    sig6(r.ks_distance),
                    sig6(r.lower_tail),
                    sig6(r.upper_tail),
                ]
            }),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.05), "0.0500000");
        assert_eq!(sig6(0.000689219), "0.000689219");
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.234e-20), "1.23400e-20");
    }
}
