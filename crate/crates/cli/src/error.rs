use thiserror::Error;

/// Exit status 2: the input could not be read, parsed or failed its schema.
pub const EXIT_INPUT: u8 = 2;
/// Exit status 1: the input was well-formed but the requested check or
/// operation failed.
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }

    pub(crate) fn input(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{context}: {err}"))
    }

    pub(crate) fn failure(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Failure(format!("{context}: {err}"))
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
