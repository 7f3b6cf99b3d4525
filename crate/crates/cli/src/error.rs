use conic_core::ConeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] ConeError),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 for malformed or unsupported input, 3 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                ConeError::Parse { .. }
                | ConeError::InvalidCone(_)
                | ConeError::DimensionMismatch { .. }
                | ConeError::NonFinite
                | ConeError::TrivialCone
                | ConeError::Unsupported { .. }
                | ConeError::OutOfRange(_)
                | ConeError::IllConditioned { .. } => 2,
                _ => 3,
            },
            CliError::Io(_) | CliError::Internal(_) => 3,
        }
    }
}
