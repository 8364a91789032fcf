//! Thin wrappers over statrs for the distributions used by the estimators.

use statrs::distribution::{Continuous, ContinuousCDF, Normal, StudentsT};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

pub fn norm_ln_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn norm_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

fn student(dof: f64) -> StudentsT {
    StudentsT::new(0.0, 1.0, dof).expect("degrees of freedom must be positive")
}

pub fn student_pdf(x: f64, dof: f64) -> f64 {
    student(dof).pdf(x)
}

pub fn student_cdf(x: f64, dof: f64) -> f64 {
    student(dof).cdf(x)
}

pub fn student_quantile(p: f64, dof: f64) -> f64 {
    student(dof).inverse_cdf(p)
}
