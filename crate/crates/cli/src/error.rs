use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Model(#[from] cavity_gbs::Error),

    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            Self::Model(cavity_gbs::Error::TruncationLeak { .. }) => 3,
            Self::Verification(_) => 4,
            Self::Write { .. } => 1,
            Self::Input(_) | Self::Read { .. } | Self::Model(_) => 2,
        };
        ExitCode::from(code)
    }
}
