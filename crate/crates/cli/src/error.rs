use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] projkit::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 for anything the caller can fix in the config
    /// or arguments, 1 for failures of the computation itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Core(e) if is_input_error(e) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

pub(crate) fn is_input_error(e: &projkit::Error) -> bool {
    use projkit::Error::*;
    matches!(
        e,
        DimensionMismatch { .. } | InvalidSet(_) | InvalidArgument(_) | Precondition(_) | OutOfRange { .. }
    )
}
