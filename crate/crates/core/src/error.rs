use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid hypervector dimension {0}; must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid architecture: {0}")]
    InvalidArch(String),

    #[error("architecture #{index} in batch: {source}")]
    BatchItem {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid rank table: {0}")]
    InvalidRanks(String),

    #[error("row count mismatch: expected {expected}, got {got}")]
    RowCountMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{row}: {message}")]
    Parse { path: PathBuf, row: usize, message: String },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Capacity(String),

    #[error("{0}: already exists (pass --force to overwrite)")]
    OutputExists(PathBuf),
}

impl Error {
    /// Short machine-parsable label used by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) | Error::DimensionMismatch { .. } => "dimension",
            Error::InvalidArch(_) => "invalid-arch",
            Error::BatchItem { source, .. } => source.category(),
            Error::InvalidRanks(_) | Error::RowCountMismatch { .. } => "invalid-ranks",
            Error::InvalidConfig(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Format { .. } => "format",
            Error::Io { .. } => "io",
            Error::Capacity(_) => "capacity",
            Error::OutputExists(_) => "exists",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
