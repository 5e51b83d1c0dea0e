//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps `Validation` to exit code 1 and `Numerical` to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: bad parameters, malformed files, out-of-domain arguments.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical procedure failed to reach its accuracy target.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code associated with this error kind.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Io(_) => 1,
            Error::Numerical(_) => 2,
        }
    }
}
