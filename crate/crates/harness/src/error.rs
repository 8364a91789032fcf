use covmc_core::CovError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error("numerical failure: {0}")]
    Numerical(CovError),

    #[error("numerical failure: {0}")]
    DegenerateReference(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<CovError> for HarnessError {
    fn from(e: CovError) -> Self {
        match e {
            CovError::InvalidParameter(msg) => HarnessError::Spec(msg),
            CovError::UnsupportedMethod { .. } => HarnessError::Spec(e.to_string()),
            other => HarnessError::Numerical(other),
        }
    }
}

impl HarnessError {
    /// Process exit code: 2 for spec errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Spec(_) | HarnessError::Io(_) => 2,
            HarnessError::Numerical(_) | HarnessError::DegenerateReference(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
