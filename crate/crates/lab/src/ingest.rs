//! Topic-by-system score matrices: wide CSV and long triplet text.
//!
//! Wide CSV: an optional `# metric=<label>` line, a header whose first cell
//! names the topic column and whose remaining cells are system ids, then one
//! row per topic.
//!
//! Long text: whitespace-separated `system topic score` lines. Blank lines
//! and lines starting with `#` are ignored, as are rows whose topic is `all`
//! (the aggregate row written by common evaluation tools).

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use pairsig_core::paired::PairedSample;

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Wide,
    Long,
}

impl InputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "wide" | "csv" => Some(InputFormat::Wide),
            "long" | "triplet" | "trec" => Some(InputFormat::Long),
            _ => None,
        }
    }

    /// `.csv` files are wide, everything else long.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => InputFormat::Wide,
            _ => InputFormat::Long,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub metric: String,
    pub topics: Vec<String>,
    pub systems: Vec<String>,
    /// `scores[topic][system]`.
    pub scores: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(
        metric: String,
        topics: Vec<String>,
        systems: Vec<String>,
        scores: Vec<Vec<f64>>,
    ) -> Result<Self, LabError> {
        if scores.len() != topics.len() {
            return Err(LabError::Config(format!(
                "{} score rows for {} topics",
                scores.len(),
                topics.len()
            )));
        }
        for (topic, row) in topics.iter().zip(&scores) {
            if row.len() != systems.len() {
                let system = systems.get(row.len()).cloned().unwrap_or_default();
                return Err(LabError::Ragged {
                    system,
                    topic: topic.clone(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(LabError::Config(format!(
                    "non-finite score for system {}, topic {topic}",
                    systems[j]
                )));
            }
        }
        Ok(Self {
            metric,
            topics,
            systems,
            scores,
        })
    }

    pub fn column(&self, system: usize) -> Vec<f64> {
        self.scores.iter().map(|row| row[system]).collect()
    }
}

fn parse_score(field: &str, line: usize) -> Result<f64, LabError> {
    let v: f64 = field.trim().parse().map_err(|_| LabError::Parse {
        line,
        message: format!("not a number: {field:?}"),
    })?;
    if !v.is_finite() {
        return Err(LabError::Parse {
            line,
            message: format!("non-finite score: {field:?}"),
        });
    }
    Ok(v)
}

pub fn read_wide_csv<R: Read>(reader: R) -> Result<ScoreMatrix, LabError> {
    let mut text = String::new();
    BufReader::new(reader)
        .read_to_string(&mut text)
        .map_err(|e| LabError::io("<input>", e))?;
    let mut metric = String::from("score");
    let mut body_start = 0;
    let mut skipped_lines = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(label) = rest.trim().strip_prefix("metric=") {
                metric = label.trim().to_string();
            }
            body_start += line.len();
            skipped_lines += 1;
        } else {
            break;
        }
    }
    let body = text.get(body_start..).unwrap_or("");
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(body.as_bytes());
    let mut records = rdr.records();
    let header = match records.next() {
        Some(h) => h?,
        None => {
            return Err(LabError::Parse {
                line: skipped_lines + 1,
                message: "empty input".into(),
            })
        }
    };
    if header.len() < 2 {
        return Err(LabError::Parse {
            line: skipped_lines + 1,
            message: "header needs a topic column and at least one system".into(),
        });
    }
    let systems: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    let mut topics = Vec::new();
    let mut scores = Vec::new();
    for record in records {
        let record = record?;
        let line = skipped_lines + record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let topic = record.get(0).unwrap_or("").trim().to_string();
        let mut row = Vec::with_capacity(systems.len());
        for (j, system) in systems.iter().enumerate() {
            match record.get(j + 1).map(str::trim) {
                None | Some("") => {
                    return Err(LabError::Ragged {
                        system: system.clone(),
                        topic,
                    })
                }
                Some(field) => row.push(parse_score(field, line)?),
            }
        }
        if record.len() > systems.len() + 1 {
            return Err(LabError::Parse {
                line,
                message: format!("{} fields for {} systems", record.len() - 1, systems.len()),
            });
        }
        topics.push(topic);
        scores.push(row);
    }
    if topics.is_empty() {
        return Err(LabError::Parse {
            line: skipped_lines + 2,
            message: "no topic rows".into(),
        });
    }
    ScoreMatrix::new(metric, topics, systems, scores)
}

pub fn read_long<R: Read>(reader: R) -> Result<ScoreMatrix, LabError> {
    let mut systems: Vec<String> = Vec::new();
    let mut topics: Vec<String> = Vec::new();
    let mut system_index: HashMap<String, usize> = HashMap::new();
    let mut topic_index: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
    let mut last_line = 0;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = line.map_err(|e| LabError::io("<input>", e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(LabError::Parse {
                line: lineno,
                message: format!("expected `system topic score`, got {} fields", fields.len()),
            });
        }
        let (system, topic) = (fields[0], fields[1]);
        if topic == "all" {
            continue;
        }
        let score = parse_score(fields[2], lineno)?;
        let s = *system_index.entry(system.to_string()).or_insert_with(|| {
            systems.push(system.to_string());
            systems.len() - 1
        });
        let t = *topic_index.entry(topic.to_string()).or_insert_with(|| {
            topics.push(topic.to_string());
            topics.len() - 1
        });
        if cells.insert((t, s), score).is_some() {
            return Err(LabError::Duplicate {
                system: system.to_string(),
                topic: topic.to_string(),
                line: lineno,
            });
        }
    }
    if systems.is_empty() {
        return Err(LabError::Parse {
            line: last_line.max(1),
            message: "empty input".into(),
        });
    }
    let mut scores = Vec::with_capacity(topics.len());
    for (t, topic) in topics.iter().enumerate() {
        let mut row = Vec::with_capacity(systems.len());
        for (s, system) in systems.iter().enumerate() {
            match cells.get(&(t, s)) {
                Some(&v) => row.push(v),
                None => {
                    return Err(LabError::Ragged {
                        system: system.clone(),
                        topic: topic.clone(),
                    })
                }
            }
        }
        scores.push(row);
    }
    ScoreMatrix::new("score".into(), topics, systems, scores)
}

pub fn load_score_matrix(path: &Path, format: InputFormat) -> Result<ScoreMatrix, LabError> {
    let file = std::fs::File::open(path).map_err(|e| LabError::io(path, e))?;
    match format {
        InputFormat::Wide => read_wide_csv(file),
        InputFormat::Long => read_long(file),
    }
}

/// Writes the wide CSV layout read by [`read_wide_csv`].
pub fn write_wide_csv<W: Write>(matrix: &ScoreMatrix, mut out: W) -> Result<(), LabError> {
    writeln!(out, "# metric={}", matrix.metric).map_err(|e| LabError::io("<output>", e))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["topic".to_string()];
    header.extend(matrix.systems.iter().cloned());
    w.write_record(&header)?;
    for (topic, row) in matrix.topics.iter().zip(&matrix.scores) {
        let mut record = vec![topic.clone()];
        record.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| LabError::io("<output>", e))?;
    Ok(())
}

/// Differences for one ordered system pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemPair {
    pub a: String,
    pub b: String,
    pub sample: PairedSample,
}

/// `D_i = score(A, i) - score(B, i)` for every pair with A before B.
pub fn paired_differences(matrix: &ScoreMatrix) -> Result<Vec<SystemPair>, LabError> {
    let k = matrix.systems.len();
    if k < 2 {
        return Err(LabError::InsufficientSystems(k));
    }
    let columns: Vec<Vec<f64>> = (0..k).map(|j| matrix.column(j)).collect();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            out.push(SystemPair {
                a: matrix.systems[a].clone(),
                b: matrix.systems[b].clone(),
                sample: PairedSample::from_scores(&columns[a], &columns[b])?,
            });
        }
    }
    Ok(out)
}
