use thiserror::Error;

/// Command failure, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or input data (exit code 2).
    #[error("invalid configuration: {0}")]
    Validation(String),
    /// Failure while running a valid configuration (exit code 1).
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl From<osim_core::Error> for CliError {
    fn from(e: osim_core::Error) -> Self {
        use osim_core::Error as E;
        match e {
            E::Parse { .. }
            | E::SelfLoop(_)
            | E::NodeOutOfRange { .. }
            | E::ParameterOutOfRange { .. }
            | E::EmptySeedSet
            | E::UnknownModel(_)
            | E::UnknownNode(_)
            | E::InvalidArgument(_)
            | E::NotEnoughNodes { .. }
            | E::DenseCapExceeded { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
