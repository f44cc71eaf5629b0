use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] raxcode_core::Error),
}

impl CliError {
    /// 2 for configuration problems, 3 when a memory or enumeration budget
    /// is exceeded, 1 when the output cannot be written.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(raxcode_core::Error::BudgetExceeded { .. })
            | CliError::Core(raxcode_core::Error::EnumerationTooLarge { .. }) => 3,
            CliError::Write { .. } => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
