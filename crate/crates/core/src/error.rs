use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the toolkit.
///
/// Variants are grouped so that front ends can map them onto exit codes:
/// usage/argument problems, data/parse problems and numerical failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parameter binding: {0}")]
    Binding(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("measurement plan does not match Hamiltonian: {0}")]
    Plan(String),

    #[error("mapping inconsistency: {0}")]
    MappingInconsistency(String),

    #[error("confusion matrix is ill-conditioned (condition number {0:.3e})")]
    Conditioning(f64),

    #[error("T-REx amplification too large: lambda = {lambda:.4} for mask {mask:#b} is below the floor {floor}")]
    Amplification { mask: u64, lambda: f64, floor: f64 },

    #[error("{kind} fit failed: {reason}")]
    FitFailure { kind: &'static str, reason: String },

    #[error("degenerate landscape: {0}")]
    Degenerate(String),

    #[error("cost evaluation failed at iteration {iteration}: {message}")]
    Evaluation { iteration: usize, message: String },

    #[error("trace error: {0}")]
    Trace(String),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Coarse classification used by command-line front ends.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Argument(_) | Error::Binding(_) | Error::Plan(_) | Error::Dimension { .. } => {
                ErrorCategory::Usage
            }
            Error::Data(_)
            | Error::Parse { .. }
            | Error::Io { .. }
            | Error::Trace(_)
            | Error::MappingInconsistency(_)
            | Error::Resource(_) => ErrorCategory::Data,
            Error::Conditioning(_)
            | Error::Amplification { .. }
            | Error::FitFailure { .. }
            | Error::Degenerate(_)
            | Error::Evaluation { .. } => ErrorCategory::Numerical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Numerical,
}

pub type Result<T> = std::result::Result<T, Error>;
