use std::path::PathBuf;

use qdm_core::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] qdm_core::Error),
}

impl CliError {
    /// 1 for unreadable or malformed input, 2 for invalid toric data,
    /// 3 for a failed invariant, 4 when the mirror stage needs nef data.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) => 1,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => 1,
                ErrorKind::Validation => 2,
                ErrorKind::Invariant => 3,
                ErrorKind::Nef => 4,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
