//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular model: {0}")]
    Singularity(String),

    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("degenerate system: {0}")]
    Degenerate(String),

    #[error("root not found: {0}")]
    NotFound(String),

    #[error("solver did not converge: {0}")]
    Convergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
