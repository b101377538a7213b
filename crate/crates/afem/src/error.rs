use std::path::PathBuf;

use afem_core::adapt::LoopRecord;

#[derive(Debug, thiserror::Error)]
pub enum AfemError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: toml::de::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed mesh file: {0}")]
    MeshFormat(String),
    #[error(transparent)]
    Numerical(#[from] afem_core::Error),
    /// A loop that failed after completing some levels.
    #[error("level {}: {error}", records.len())]
    Aborted { error: afem_core::Error, records: Vec<LoopRecord> },
}

impl AfemError {
    /// Process exit code: 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AfemError::Numerical(e) | AfemError::Aborted { error: e, .. } if !inadmissible(e) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AfemError::Io { path: path.into(), source }
    }
}

/// Errors caused by the problem data rather than by the computation.
fn inadmissible(e: &afem_core::Error) -> bool {
    matches!(e, afem_core::Error::ObstacleAboveData { .. } | afem_core::Error::MissingLaplacian)
}

pub type Result<T> = std::result::Result<T, AfemError>;
