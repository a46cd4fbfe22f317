use thiserror::Error;

/// Failures that stop a run before a report exists. Verification failures are
/// not errors: they are recorded in the report.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] chyp_core::Error),
}

impl CliError {
    /// Exit status: every error here is a usage or configuration error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
