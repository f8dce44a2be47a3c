use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("row {index} has dimension {got}, stream dimension is {expected}")]
    RowDimension {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("row {index} contains a non-finite entry")]
    NonFiniteRow { index: usize },

    #[error("non-finite input value")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("rank-one update would destroy positive definiteness (1 + s*u'X^-1u = {0:e})")]
    IndefiniteUpdate(f64),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<V, E = Error> = std::result::Result<V, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
