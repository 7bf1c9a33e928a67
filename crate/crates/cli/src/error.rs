use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    /// Malformed or inconsistent input data.
    #[error("input: {0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Input(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

/// Library errors are validation errors except for genuinely numerical failures.
impl From<coorbit::Error> for CliError {
    fn from(e: coorbit::Error) -> Self {
        use coorbit::Error as E;
        match e {
            E::GenericityFailure { .. }
            | E::AllPairsEquivalent
            | E::KernelIntersectsFamily { .. }
            | E::EnumerationTooLarge { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}
