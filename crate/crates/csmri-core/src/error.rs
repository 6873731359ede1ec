//! Error taxonomy shared by every crate in the workspace.
//!
//! The variants map onto the process exit codes used by the command-line
//! front end: configuration and parameter problems exit with code 2, a
//! solver abort (non-finite iterates) exits with code 3, everything else
//! exits with code 1.

use thiserror::Error;

/// Workspace-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An image or mask was expected to be square.
    #[error("array must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Two operands disagree in shape or size.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    /// A NaN or infinity appeared where finite data is required.
    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    /// A parameter is outside its documented domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A mask generator cannot realize the requested sampling rate.
    #[error("unreachable sampling rate {requested} for {kind} mask of size {n}")]
    UnreachableRate {
        kind: &'static str,
        requested: f64,
        n: usize,
    },

    /// An iterative solver produced non-finite iterates and stopped.
    #[error("solver aborted at iteration {iter}: {reason}")]
    SolverAbort { iter: usize, reason: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A file did not conform to its declared format.
    #[error("{path}: malformed {format} data: {reason}")]
    Format {
        path: String,
        format: &'static str,
        reason: String,
    },

    /// A configuration file is syntactically or semantically invalid.
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Convenience alias used across the workspace.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Build a [`Error::NonFinite`] with a formatted context.
    pub fn non_finite(context: impl Into<String>) -> Self {
        Error::NonFinite {
            context: context.into(),
        }
    }

    /// Build an [`Error::InvalidParameter`].
    pub fn invalid_parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
