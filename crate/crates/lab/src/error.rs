use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("refusing to write an empty report to {0}")]
    EmptyReport(PathBuf),
    #[error("numerical error in {context}: {source}")]
    Numeric { context: String, source: ckn_core::Error },
}

impl LabError {
    /// 2 for anything the user can fix in the config, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Read { .. } => 2,
            _ => 3,
        }
    }

    pub(crate) fn numeric(context: impl Into<String>, source: ckn_core::Error) -> Self {
        LabError::Numeric { context: context.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
