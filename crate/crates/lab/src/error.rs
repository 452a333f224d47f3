use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("window guard: {0}")]
    Guard(String),
    #[error("malformed file {path}: {reason}")]
    Format { path: String, reason: String },
    #[error(transparent)]
    Core(#[from] qwalk_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Process exit code: 2 for a guard violation under `--strict`, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Guard(_) => 2,
            _ => 1,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
