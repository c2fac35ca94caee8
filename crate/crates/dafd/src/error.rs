//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, DafdError>;

#[derive(Debug, thiserror::Error)]
pub enum DafdError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed content in a data or config file, with its location.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: String, detail: String },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training failed: {0}")]
    Train(String),
}

impl DafdError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DafdError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        DafdError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn shape(op: impl Into<String>, detail: impl Into<String>) -> Self {
        DafdError::Shape {
            op: op.into(),
            detail: detail.into(),
        }
    }
}
