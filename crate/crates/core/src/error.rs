use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator and its tooling.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, parameter or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A coefficient family breaches one of its declared bounds.
    #[error("assumption (A1) violated: {0}")]
    A1(String),

    /// Two fields (or a field and a table) live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Non-finite values appeared during time stepping.
    #[error("blow-up detected at step {step} (t = {t})")]
    BlowUp { step: usize, t: f64 },

    /// Malformed configuration text.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Malformed or mismatched snapshot file.
    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
