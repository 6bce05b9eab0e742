use ets_core::EtsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable files, malformed JSON, bad flag values.
    #[error("{0}")]
    Input(String),
    /// Well-formed input that violates the model's constraints.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<EtsError> for CliError {
    fn from(e: EtsError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}
