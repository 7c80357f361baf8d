use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation outside the valid domain (singular point, point outside the
    /// inner box, sampler support violation).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid parameter or configuration value.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Grid too coarse relative to the data it must represent.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A quadrature self-check (doubled-node ratio test) failed.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// Inconsistent field dimensions.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// Malformed file contents.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
