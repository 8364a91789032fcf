use thiserror::Error;

/// Errors raised by estimators, kernels and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CovError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge on [{lower}, {upper}]: partial estimate {estimate} (error {error})")]
    QuadratureFailed {
        lower: f64,
        upper: f64,
        estimate: f64,
        error: f64,
    },

    #[error("degenerate ray: denominator integral is {0}")]
    DegenerateRay(f64),

    #[error("singular Jacobian at the root")]
    SingularJacobian,

    #[error("no root of the level function in the search slice")]
    RootNotFound,

    #[error("non-finite sample at path {index}")]
    PoisonedSample { index: u64 },

    #[error("{method} is not available for {target}")]
    UnsupportedMethod { method: String, target: String },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("level function is not homogeneous: h(t z) = {observed}, expected {expected}")]
    NotHomogeneous { observed: f64, expected: f64 },
}

pub type Result<T> = std::result::Result<T, CovError>;
