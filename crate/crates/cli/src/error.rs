use std::path::{Path, PathBuf};

use thiserror::Error;

/// Exit-code bearing error. User and config problems exit with 1,
/// broken internal invariants with 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{context}: {source}")]
    Core {
        context: String,
        source: memefuse_core::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// Attaches context to core errors.
pub trait Context<T> {
    fn context(self, what: impl std::fmt::Display) -> CliResult<T>;
}

impl<T> Context<T> for memefuse_core::Result<T> {
    fn context(self, what: impl std::fmt::Display) -> CliResult<T> {
        self.map_err(|source| CliError::Core {
            context: what.to_string(),
            source,
        })
    }
}
