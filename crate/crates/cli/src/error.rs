use std::path::Path;

use ptboot_core::BootError;
use thiserror::Error;

/// Anything that ends a command early, with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Boot(#[from] BootError),

    #[error("{0}")]
    Failed(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn at_line(self, line: usize) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("line {line}: {m}")),
            CliError::Boot(e) => CliError::Config(format!("line {line}: {e}")),
            other => other,
        }
    }

    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        }
    }

    /// 2 when the run finished but found nothing feasible or a check failed, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Boot(BootError::NoFeasiblePoint { .. }) | CliError::Failed(_) => 2,
            _ => 1,
        }
    }
}
