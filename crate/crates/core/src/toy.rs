//! Small problems with known answers used to validate the kernels.
//!
//! Examples 1 and 2: `X1, X2` iid Exp(1), `g(x) = x1`, with `h = x1 + x2` or
//! `h = max(x1, x2)`. Example 3: `X ~ N(0, I_m)`, `g = 1`, with `h` the sum,
//! the maximum or the Euclidean norm (the threshold applies to the norm, so
//! the event is `{x'x <= xi^2}`).

use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::cov::{HomogeneousKernel, SensitivityProblem};
use crate::error::Result;
use crate::rng::PathRng;
use crate::special::{ln_gamma, norm_cdf, norm_pdf};

fn exp_pair_density(x: &[f64]) -> f64 {
    if x[0] > 0.0 && x[1] > 0.0 { (-x[0] - x[1]).exp() } else { 0.0 }
}

pub fn example1_problem(xi: f64) -> Result<SensitivityProblem> {
    SensitivityProblem::builder(2)
        .weight(|x| x[0])
        .level(|x| x[0] + x[1], |_, g| g.fill(1.0))
        .density(exp_pair_density)
        .support(0.0, f64::INFINITY)
        .threshold(xi)
        .build()
}

pub fn example2_problem(xi: f64) -> Result<SensitivityProblem> {
    SensitivityProblem::builder(2)
        .weight(|x| x[0])
        .level(
            |x| x[0].max(x[1]),
            |x, g| {
                let first = x[0] >= x[1];
                g[0] = if first { 1.0 } else { 0.0 };
                g[1] = if first { 0.0 } else { 1.0 };
            },
        )
        .density(exp_pair_density)
        .support(0.0, f64::INFINITY)
        .threshold(xi)
        .build()
}

/// Closed-form conditional probability estimator along the ray through `y`, `s = y1 + y2`.
pub fn example1_w(y: &[f64], xi: f64) -> f64 {
    let s = y[0] + y[1];
    2.0 * y[0] / s - (-s * xi).exp() * (2.0 * y[0] / s + 2.0 * y[0] * xi + y[0] * s * xi * xi)
}

/// `E[X1 1{X1 + X2 <= xi}]`.
pub fn example1_expectation(xi: f64) -> f64 {
    0.5 * (2.0 - (-xi).exp() * (xi * xi + 2.0 * xi + 2.0))
}

pub fn example1_derivative(xi: f64) -> f64 {
    0.5 * xi * xi * (-xi).exp()
}

/// Example 1 and 2 sampler: two iid unit exponentials.
pub fn sample_exp_pair(rng: &mut PathRng, x: &mut [f64]) {
    x[0] = Exp1.sample(rng);
    x[1] = Exp1.sample(rng);
}

/// Level functions of the Gaussian example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyShape {
    Max,
    Sum,
    Quadratic,
}

fn std_normal_density(x: &[f64]) -> f64 {
    x.iter().map(|&v| norm_pdf(v)).product()
}

pub fn example3_problem(shape: ToyShape, m: usize, xi: f64) -> Result<SensitivityProblem> {
    let b = SensitivityProblem::builder(m).density(std_normal_density).threshold(xi);
    match shape {
        ToyShape::Sum => b.level(|x| x.iter().sum(), |_, g| g.fill(1.0)).build(),
        ToyShape::Max => b
            .level(
                |x| x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                |x, g| {
                    let arg = x.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |p| p.0);
                    g.fill(0.0);
                    g[arg] = 1.0;
                },
            )
            .build(),
        ToyShape::Quadratic => b
            .level(
                |x| x.iter().map(|v| v * v).sum::<f64>().sqrt(),
                |x, g| {
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    g.iter_mut().zip(x).for_each(|(a, b)| *a = b / r);
                },
            )
            .support(0.0, f64::INFINITY)
            .build(),
    }
}

pub fn example3_kernel(shape: ToyShape, m: usize, xi: f64) -> Result<HomogeneousKernel> {
    HomogeneousKernel::new(example3_problem(shape, m, xi)?)
}

/// Conditional density estimator for Example 3 at a point `z` on the unit level set.
pub fn example3_nu(shape: ToyShape, z: &[f64], xi: f64) -> Result<f64> {
    example3_kernel(shape, z.len(), xi)?.nu(z)
}

/// Exact `d/dxi P(h(X) <= xi)` for Example 3.
pub fn example3_derivative(shape: ToyShape, m: usize, xi: f64) -> f64 {
    let mf = m as f64;
    match shape {
        ToyShape::Sum => norm_pdf(xi / mf.sqrt()) / mf.sqrt(),
        ToyShape::Max => mf * norm_cdf(xi).powi(m as i32 - 1) * norm_pdf(xi),
        ToyShape::Quadratic => {
            if xi <= 0.0 {
                return 0.0;
            }
            // Chi density with m degrees of freedom.
            let ln = (1.0 - 0.5 * mf) * std::f64::consts::LN_2 + (mf - 1.0) * xi.ln() - 0.5 * xi * xi - ln_gamma(0.5 * mf);
            ln.exp()
        }
    }
}

pub fn sample_std_normal(rng: &mut PathRng, x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v = StandardNormal.sample(rng));
}
