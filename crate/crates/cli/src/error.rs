use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad config, or arguments outside a kernel's domain.
    #[error("usage: {0}")]
    Usage(String),

    /// A computation failed or could not be decided.
    #[error("{0}")]
    Numeric(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<logevo_core::Error> for CliError {
    fn from(e: logevo_core::Error) -> Self {
        use logevo_core::Error as E;
        match e {
            E::Domain(_) | E::Unsupported(_) | E::GridMismatch(_) => CliError::Usage(e.to_string()),
            E::Unverifiable { .. } | E::Numeric { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
