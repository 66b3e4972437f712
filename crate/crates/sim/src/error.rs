use std::io;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] cnoma_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    /// Process exit code: 2 for bad input, 3 for numerical failure, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Core(e) if e.is_numeric() => 3,
            SimError::Core(_) | SimError::Config(_) => 2,
            SimError::Io(_) | SimError::Csv(_) => 4,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
