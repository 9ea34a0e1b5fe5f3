use craft_core::io::IoError;

/// Exit status for bad or missing input.
pub const EXIT_INPUT: i32 = 2;
/// Exit status for output that cannot be written.
pub const EXIT_OUTPUT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Output(_) => EXIT_OUTPUT,
        }
    }

    pub fn input(msg: impl std::fmt::Display) -> Self {
        CliError::Input(msg.to_string())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Output(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
