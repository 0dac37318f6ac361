use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The input is structurally valid but carries no usable signal
    /// (e.g. an all-zero spectrum has no peak to lock onto).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// Fewer samples than the estimator or reader needs.
    #[error("insufficient samples: need {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    /// A file or text payload could not be decoded.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
