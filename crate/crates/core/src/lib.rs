//! Monte Carlo sensitivity estimation by change-of-variables conditional Monte Carlo,
//! with likelihood-ratio and conventional conditional Monte Carlo comparators.

pub mod ccp;
pub mod cov;
pub mod engine;
pub mod error;
pub mod greeks;
pub mod models;
pub mod quadrature;
pub mod rng;
pub mod roots;
pub mod special;
pub mod stats;
pub mod toy;

pub use engine::{Execution, SimConfig};
pub use error::{CovError, Result};
pub use stats::{estimate_mean, EstimatorOutput};
