use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] critdisc::Error),
    #[error("{source}; {hint}")]
    Hinted {
        source: critdisc::Error,
        hint: &'static str,
    },
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_internal() => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) | CliError::Hinted { source: e, .. } => e.kind(),
            CliError::Usage(_) => "usage",
            CliError::Write { .. } => "io",
        }
    }

    /// Single-line `key=value` rendering for stderr.
    pub fn line(&self) -> String {
        format!(
            "error: kind={} exit={} message={:?}",
            self.kind(),
            self.exit_code(),
            self.to_string().replace('\n', " ")
        )
    }
}
