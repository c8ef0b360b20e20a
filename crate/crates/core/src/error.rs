use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distribution has {0} components, at least 2 are required")]
    TooFewLabels(usize),
    #[error("negative degree {value} at label {index}")]
    NegativeDegree { index: usize, value: f64 },
    #[error("degrees sum to {sum}, expected 1 within 1e-9")]
    NotNormalized { sum: f64 },
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("feature vector is empty")]
    EmptyFeatures,
    #[error("feature vector has no nonzero component")]
    ZeroFeatureVector,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("softmax base must be finite and greater than 1, got {0}")]
    BadBase(f64),
    #[error("invalid weight configuration: {0}")]
    BadWeightConfig(String),
    #[error("vector has zero norm")]
    ZeroVector,
    #[error("empty evaluation set")]
    EmptySet,
    #[error("prototype id {id} out of range for {labels} labels")]
    BadPrototypeId { id: usize, labels: usize },
    #[error("k = {k} outside [1, {max}]")]
    BadK { k: usize, max: usize },
    #[error("every prototype is empty")]
    AllPrototypesEmpty,
    #[error("{name} = {value} outside the allowed range")]
    BadRange { name: &'static str, value: f64 },
    #[error("threshold {threshold} must be below 1/L = {limit}")]
    ThresholdTooHigh { threshold: f64, limit: f64 },
    #[error("{samples} samples cannot be split into {folds} folds")]
    TooFewSamples { samples: usize, folds: usize },
    #[error("a paired test needs at least 2 runs, got {0}")]
    TooFewRuns(usize),
    #[error("sweep grid for {0} is empty")]
    EmptyGrid(String),
    #[error("invalid synthetic spec: {0}")]
    BadSpec(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for I/O and parsing, 3 for invalid
    /// data or arguments, 4 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Usage(_) => 2,
            Error::Row { source, .. } => source.exit_code(),
            Error::Internal(_) => 4,
            _ => 3,
        }
    }

    pub(crate) fn at_row(self, row: usize) -> Error {
        Error::Row {
            row,
            source: Box::new(self),
        }
    }
}
