use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot read {path}: {reason}")]
    Input { path: PathBuf, reason: String },
    #[error("cannot write {}: {source}", target.as_ref().map_or("standard output".into(), |p| p.display().to_string()))]
    Io { target: Option<PathBuf>, source: std::io::Error },
    #[error(transparent)]
    Numeric(#[from] discspec_core::Error),
    #[error("{0} bound(s) violated")]
    Violated(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input { .. } | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
            CliError::Violated(_) => 1,
        }
    }
}

pub fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
