use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Schema violation or a scenario the library cannot run as configured.
    #[error("config error: {0}")]
    Config(String),

    #[error("scenario `{scenario}`: {source}")]
    Physics {
        scenario: String,
        #[source]
        source: gausspacket::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics { .. } | CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn config(path: impl AsRef<str>, msg: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{}: {msg}", path.as_ref()))
    }
}
