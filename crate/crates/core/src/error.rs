use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("degenerate body: {0}")]
    Degenerate(String),

    #[error("point is not in the span of the generators")]
    NotSpanning,

    #[error("dimension {dim} exceeds the limit {max} for {what}")]
    DimensionTooLarge { dim: usize, max: usize, what: &'static str },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("monte carlo estimate unusable: {0}")]
    ZeroHits(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParam { name: name.to_string(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
