use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed PGM {path}: {reason}")]
    Pgm { path: PathBuf, reason: String },

    #[error("manifest {path}, row {row}: {reason}")]
    ManifestRow {
        path: PathBuf,
        row: usize,
        reason: String,
    },

    #[error("duplicate sample_id `{0}` in manifest")]
    DuplicateSample(String),

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty ROI mask")]
    EmptyMask,

    #[error("empty co-occurrence: no in-ROI pixel pair at offset ({0}, {1})")]
    EmptyCooccurrence(isize, isize),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("labels contain a single class")]
    SingleClass,

    #[error("enumeration guard: {0} visible units exceeds the limit of {1}")]
    EnumerationGuard(usize, usize),

    #[error("non-finite parameter at epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize },

    #[error("feature columns do not match the fitted model: {0}")]
    ColumnMismatch(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("sample `{sample_id}`: {source}")]
    Sample {
        sample_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the error stems from user configuration rather than data or runtime state.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) => true,
            Error::Fold { source, .. } | Error::Sample { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
