//! Error taxonomy shared by the library and the CLI.
//!
//! Errors are grouped by the exit code they map to on the command line:
//! configuration/parameter problems (exit 2), partial results such as a
//! resolution guard firing before any usable frame (exit 3), and numeric
//! failures such as a NaN appearing mid-integration (exit 4).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BhError {
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("accuracy error: {0} (achieved estimate {achieved:e})", achieved = .1)]
    Accuracy(String, f64),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("partial results: {0}")]
    Partial(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

impl BhError {
    /// CLI exit code for this error class: 2 config, 3 partial, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            BhError::Parameter(_)
            | BhError::GridMismatch(_)
            | BhError::Config(_)
            | BhError::Format(_) => 2,
            BhError::Partial(_) => 3,
            BhError::Resolution(_)
            | BhError::Accuracy(_, _)
            | BhError::Numeric(_)
            | BhError::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, BhError>;
