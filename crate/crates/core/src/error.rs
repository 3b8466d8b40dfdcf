use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operands are incompatible (basis mismatch, wrong dimension, unnormalized input).
    #[error("usage error: {0}")]
    Usage(String),

    /// A dense solve was requested above the configured dimension cap.
    #[error("dimension {dim} exceeds dense cap {cap}; use the Krylov propagator")]
    Capacity { dim: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    /// Krylov propagation could not meet its tolerance.
    #[error("propagation failed at step {step}: residual {residual:e} above tolerance")]
    Propagation { step: usize, residual: f64 },

    #[error("config error: {0}")]
    Config(String),

    /// Failure inside one member of an ensemble or sweep.
    #[error("realization {index}: {source}")]
    Realization {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// The innermost error, looking through [`Error::Realization`].
    pub fn root(&self) -> &Error {
        match self {
            Error::Realization { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn in_realization(index: usize) -> impl FnOnce(Error) -> Error {
        move |e| Error::Realization {
            index,
            source: Box::new(e),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
