use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension mismatch between set `{left}` (D={left_dim}) and set `{right}` (D={right_dim})")]
    SetDimensionMismatch {
        left: String,
        left_dim: usize,
        right: String,
        right_dim: usize,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("embedding has a non-finite component at index {0}")]
    NonFinite(usize),

    #[error("embedding has zero norm")]
    ZeroNorm,

    #[error("detection score {0} outside (0, 1]")]
    InvalidScore(f64),

    #[error("cluster {0} has a zero-norm centroid")]
    DegenerateCluster(usize),

    #[error("duplicate set id `{0}`")]
    DuplicateSetId(String),

    #[error("unknown set id `{0}`")]
    UnknownSetId(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("probe `{0}` appears in its own neighbor list")]
    ProbeInNeighbors(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for this error: 2 for I/O failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
