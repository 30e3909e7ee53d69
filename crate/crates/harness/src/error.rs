use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error(transparent)]
    Numerical(#[from] dirty_bosons::Error),
    #[error("{context}: {source}")]
    Realization { context: String, source: dirty_bosons::Error },
    #[error("unknown experiment `{name}`; valid experiments are {}", valid.join(", "))]
    UnknownExperiment { name: String, valid: Vec<&'static str> },
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt artifact header: {0}")]
    CorruptHeader(String),
    #[error("acceptance failed: {0}")]
    AcceptanceFail(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("serialization error: {0}")]
    Serialization(String),
}

impl HarnessError {
    /// Process exit code: 1 for invalid input, 2 for numerical failure, 3 for a failed
    /// acceptance verdict.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numerical(_) | HarnessError::Realization { .. } => 2,
            HarnessError::AcceptanceFail(_) => 3,
            _ => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn in_realization(index: u64, source: dirty_bosons::Error) -> Self {
        HarnessError::Realization { context: format!("realization {index}"), source }
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Serialization(e.to_string())
    }
}
