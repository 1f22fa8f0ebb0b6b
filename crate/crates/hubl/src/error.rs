use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by how a caller should react: `Invalid` means the
/// inputs (model, policy, config) violate a documented precondition, `Format`
/// and `Io` are data/file problems, and `CheckFailed` marks an analysis
/// invariant that did not hold at run time.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition (bad probability row,
    /// out-of-range discount, tol <= 0, mismatched dimensions, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A data file was syntactically or structurally malformed. Line numbers
    /// are 1-based and refer to the source file.
    #[error("{}:{line}: {message}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// An I/O operation failed; the path is always reported.
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An analysis-time check (decomposition residual, lemma, bound
    /// domination) failed beyond tolerance.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: msg.into(),
        }
    }

    /// Process exit code used by the CLI: 2 for validation errors, 3 for
    /// file/IO errors, 4 for failed analysis checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) => 2,
            Error::Format { .. } | Error::Io { .. } => 3,
            Error::CheckFailed(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
