use std::fmt;

/// Exit-code classes: usage/parse problems exit 2, solver or verdict
/// failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Failure(anyhow::Error),
}

impl CliError {
    pub fn usage(msg: impl fmt::Display) -> Self {
        CliError::Usage(anyhow::anyhow!("{msg}"))
    }

    pub fn failure(msg: impl fmt::Display) -> Self {
        CliError::Failure(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(e) | CliError::Failure(e) => write!(f, "{e:#}"),
        }
    }
}
