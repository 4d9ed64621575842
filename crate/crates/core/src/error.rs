use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vertex count {count} exceeds the cap {cap}")]
    CapExceeded { count: u128, cap: usize },

    #[error("matrix is not Hermitian: |A[{i}][{j}] - conj(A[{j}][{i}])| = {deviation:e}")]
    NotHermitian { i: usize, j: usize, deviation: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("sequence defined up to n = {available}, but n = {requested} is required")]
    SequenceTooShort { available: usize, requested: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("label `{0}` not found")]
    MissingLabel(String),

    #[error("{0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
