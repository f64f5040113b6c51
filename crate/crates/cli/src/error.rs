use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] cdkink::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} acceptance criteria failed")]
    Acceptance { failed: usize },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 0 success, 1 runtime failure, 2 validation/config error, 3 failed
    /// acceptance criteria.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if is_validation(e) => 2,
            CliError::Core(_) | CliError::Io { .. } => 1,
            CliError::Acceptance { .. } => 3,
        }
    }
}

fn is_validation(e: &cdkink::Error) -> bool {
    use cdkink::Error::*;
    match e {
        InvalidParameter(_) | Domain { .. } | Unsupported(_) => true,
        Mode { source, .. } => is_validation(source),
        _ => false,
    }
}
