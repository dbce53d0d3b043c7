use thiserror::Error;

/// Error type shared by every module of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter set or argument was rejected by validation.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// A numerical routine could not produce a trustworthy result
    /// (support overflow, non-finite intermediate, broken normalization).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A protocol trace failed an internal consistency identity.
    #[error("trace integrity: {0}")]
    Integrity(String),
    /// An argument lies outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
