use thiserror::Error;

/// Errors produced by chain construction, geometry kernels and estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    /// A geometric configuration on a measure-zero degenerate set.
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("diagram has {crossings} crossings, state sum is capped at {max}")]
    Capacity { crossings: usize, max: usize },

    #[error("projection rejection rate {rejected}/{attempts} exceeds 50%")]
    Conditioning { rejected: u64, attempts: u64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
