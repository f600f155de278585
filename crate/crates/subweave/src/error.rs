//! Error type shared by the library and the CLI, with fixed exit codes.

use std::path::Path;

/// Anything that can abort a command, classified by exit code.
///
/// The classes map to the process exit codes the binary promises:
/// usage mistakes exit 1, filesystem and file-format failures exit 2,
/// training and numeric failures exit 3.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad flags, invalid configuration, malformed manifest: caller mistakes.
    #[error("{0}")]
    Usage(String),
    /// Failures reading or writing files, including unparseable artifacts.
    #[error("{0}")]
    Io(String),
    /// Training or analysis failed on valid inputs.
    #[error("{0}")]
    Compute(String),
}

impl AppError {
    /// The process exit code this error class maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Io(_) => 2,
            AppError::Compute(_) => 3,
        }
    }

    /// Wraps a filesystem error with the path it concerns.
    pub fn io(path: &Path, err: impl std::fmt::Display) -> AppError {
        AppError::Io(format!("{}: {err}", path.display()))
    }

    /// Tags a core error with the pipeline stage it aborted.
    pub fn stage(stage: &str, err: subweave_core::Error) -> AppError {
        AppError::Compute(format!("stage {stage}: {err}"))
    }
}

/// Convenience alias for fallible operations in this crate.
pub type Result<T> = std::result::Result<T, AppError>;
