//! Error types shared across the crate.

use std::path::PathBuf;

/// Errors produced by corpus handling, scoring, ranking and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: parse error: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid corpus: {0}")]
    Validation(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown listener {0:?}")]
    UnknownListener(String),

    #[error("listener {0} has fewer than 2 songs; pattern scores are undefined")]
    IneligibleListener(u32),

    #[error("walk source {node} out of range for {dim} nodes")]
    SourceOutOfRange { node: usize, dim: usize },

    #[error("walk source {0} is a song node; walks start at a listener node")]
    SourceNotListener(usize),

    #[error("matrix dimension {dim} exceeds dense-solve cap {cap}")]
    DenseDimension { dim: usize, cap: usize },

    #[error("dense solve failed: system is singular")]
    SingularSystem,

    #[error("listener {listener} playlist of {len} songs is too small to split (needs at least 3)")]
    PlaylistTooSmall { listener: u32, len: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
