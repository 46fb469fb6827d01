use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum QdError {
    /// A caller violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// A configuration value failed validation. `path` is the dotted key path.
    #[error("invalid configuration at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("failed to parse configuration: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An invariant check failed during a run.
    #[error("invariant violated at generation {generation}: {message}")]
    Invariant { generation: usize, message: String },
}

impl QdError {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        QdError::Usage(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        QdError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QdError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = QdError> = std::result::Result<T, E>;
