//! Error type shared across the library.

use thiserror::Error;

/// Unified error for parameter validation, data ingestion, and model fitting.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter is outside its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Matrix/vector shapes do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A value escaped its required domain (e.g. features outside [0,1]).
    #[error("domain violation: {0}")]
    Domain(String),

    /// CSV parsing failed; `row` is 1-based and counts the header if present.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// Labels are unusable (missing column, empty class, non-contiguous ids).
    #[error("label error: {0}")]
    Label(String),

    /// Requested split/fold sizes cannot be satisfied by the data.
    #[error("infeasible split: {0}")]
    InfeasibleSplit(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
