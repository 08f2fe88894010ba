use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] duality_core::Error),
    #[error("duality relation violated: {0}")]
    Violation(String),
}

impl CliError {
    /// 1 for input and I/O problems, 2 when a duality inequality fails.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 2,
            _ => 1,
        }
    }
}
