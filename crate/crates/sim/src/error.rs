use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] wov_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub type SimResult<T> = Result<T, SimError>;

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io { path: path.into(), source }
    }

    /// True for errors caused by an impossible plan or parameter set rather
    /// than a malformed request or an internal failure.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            SimError::Core(wov_core::Error::FrequencyPlan(_) | wov_core::Error::InvalidParameter(_))
                | SimError::Invalid(_)
        )
    }
}
