use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mean-zero violation: constant-mode coefficient {value:e} exceeds tolerance {tolerance:e}")]
    ZeroMeanViolation { value: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite data: {0}")]
    NonFinite(String),

    #[error("step failure at t = {t}: {reason}")]
    StepFailure {
        t: f64,
        reason: String,
        state: Box<crate::dynamics::SimState>,
    },

    #[error("explicit integrator blew up at t = {t}: norm grew from {before:e} to {after:e}")]
    BlowUp { t: f64, before: f64, after: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("assumption check failed: {0}")]
    Assumption(String),

    #[error("corrupt file {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
