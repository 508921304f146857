//! Std companion of `pairsig-core`: the parallel Monte Carlo engine,
//! score-matrix ingestion, spec files, report writers and the `pairsig`
//! command line.

pub mod cli;
pub mod engine;
pub mod ingest;
pub mod report;
pub mod specfile;

pub use pairsig_core as core;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] pairsig_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("ragged input: system {system} has no score for topic {topic}")]
    Ragged { system: String, topic: String },
    #[error("duplicate score for system {system}, topic {topic} (line {line})")]
    Duplicate {
        system: String,
        topic: String,
        line: usize,
    },
    #[error("need at least 2 systems, found {0}")]
    InsufficientSystems(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cell {0}: {1}")]
    Cell(String, Box<LabError>),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
