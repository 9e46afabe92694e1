use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("index {index} out of range {range}")]
    Index { index: i64, range: String },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("configuration error:\n  {}", .0.join("\n  "))]
    Configuration(Vec<String>),

    #[error("stability violation: dt = {dt:e} exceeds the CFL bound {bound:e}")]
    Stability { dt: f64, bound: f64 },

    #[error("divergence at step {step} (t = {t}): {what}")]
    Divergence { step: u64, t: f64, what: String },

    #[error("degenerate frame at grid point {index}: {what}")]
    Degeneracy { index: usize, what: String },

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("unsupported snapshot version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("corrupt snapshot header: {0}")]
    CorruptHeader(String),

    #[error("snapshot length mismatch: header declares {expected} bytes of payload, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(vec![msg.into()])
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Configuration(_) | Error::Parameter(_) => 2,
            Error::Io { .. }
            | Error::UnsupportedVersion { .. }
            | Error::CorruptHeader(_)
            | Error::LengthMismatch { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
