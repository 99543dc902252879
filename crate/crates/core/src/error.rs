//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown lattice `{0}`")]
    UnknownLattice(String),
    #[error("malformed lattice: {0}")]
    MalformedLattice(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("backend capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("iterative solver did not converge: {0}")]
    NonConvergence(String),
    #[error("time series already carries shot noise")]
    AlreadyNoisy,
    #[error("corrupted series: {0}")]
    CorruptedSeries(String),
    #[error("distribution support mismatch: {0}")]
    SupportMismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
