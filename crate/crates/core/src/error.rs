use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("moment diverges: {0}")]
    DivergedMoment(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error("need at least {required} observations, got {actual}")]
    TooFewObservations { required: usize, actual: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("target {target} is out of the attainable range [{low}, {high}] for {what}")]
    CalibrationRange {
        what: String,
        target: f64,
        low: f64,
        high: f64,
    },

    #[error("calibration objective is not monotone over the bracket for {0}")]
    NonMonotone(String),

    #[error("exact signed-rank distribution requires tie-free integer ranks (got statistic {0})")]
    TiesPresent(f64),

    #[error("exact signed-rank distribution supports n <= {max}, got {n}")]
    ExactTooLarge { n: usize, max: usize },

    #[error("irregular beta-binomial specs keep their support fixed and cannot be rescaled")]
    AffineExempt,
}

pub type Result<T> = core::result::Result<T, Error>;
