use std::path::PathBuf;

use qinfer::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid input: {0}")]
    Invalid(CoreError),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
}

impl CliError {
    /// 2 for configuration and validation problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Numerical(_)
            | CoreError::ScoreResidual(_)
            | CoreError::ZeroInformation
            | CoreError::ZeroLikelihood
            | CoreError::ZeroProbability { .. }
            | CoreError::Domain(_)
            | CoreError::NotTraceless(_) => CliError::Numerical(e),
            _ => CliError::Invalid(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
