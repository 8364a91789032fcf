//! Change-of-variables conditional Monte Carlo kernels.
//!
//! For `alpha(xi) = E[g(X) 1{h(X) <= xi}]` the sample is mapped to a point `z`
//! on the unit level set of `h` and the estimator integrates along the line
//! through `z`. [`HomogeneousKernel`] uses rays `t z` for positively
//! homogeneous `h`; [`Case1Kernel`] solves `h(z, s) = xi` for the last
//! coordinate.

use std::sync::Arc;

use crate::engine::{run_paths, SimConfig};
use crate::error::{CovError, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::rng::{PathRng, StreamFamily};
use crate::stats::EstimatorOutput;
use crate::roots::root_in_slice;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
pub type InverseFn = Arc<dyn Fn(&[f64], f64) -> Option<f64> + Send + Sync>;

const LEVEL_TOL: f64 = 1e-8;

/// The quantity whose threshold derivative is estimated: `g`, `h`, its gradient, the density of `X`,
/// the support `(c0, c1)` of `h(X)` and the threshold `xi`.
#[derive(Clone)]
pub struct SensitivityProblem {
    pub dim: usize,
    pub weight: ScalarFn,
    pub level: ScalarFn,
    pub level_gradient: GradientFn,
    pub density: ScalarFn,
    pub support: (f64, f64),
    pub threshold: f64,
}

impl std::fmt::Debug for SensitivityProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SensitivityProblem")
            .field("dim", &self.dim)
            .field("support", &self.support)
            .field("threshold", &self.threshold)
            .finish_non_exhaustive()
    }
}

#[derive(Default)]
pub struct ProblemBuilder {
    dim: usize,
    weight: Option<ScalarFn>,
    level: Option<(ScalarFn, GradientFn)>,
    density: Option<ScalarFn>,
    support: Option<(f64, f64)>,
    threshold: Option<f64>,
}

impl ProblemBuilder {
    pub fn weight(mut self, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.weight = Some(Arc::new(g));
        self
    }

    pub fn level(
        mut self,
        h: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        self.level = Some((Arc::new(h), Arc::new(gradient)));
        self
    }

    pub fn density(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.density = Some(Arc::new(f));
        self
    }

    pub fn support(mut self, c0: f64, c1: f64) -> Self {
        self.support = Some((c0, c1));
        self
    }

    pub fn threshold(mut self, xi: f64) -> Self {
        self.threshold = Some(xi);
        self
    }

    pub fn build(self) -> Result<SensitivityProblem> {
        let missing = |what: &str| CovError::InvalidParameter(format!("sensitivity problem is missing {what}"));
        if self.dim == 0 {
            return Err(CovError::InvalidParameter("dimension must be positive".into()));
        }
        let (level, level_gradient) = self.level.ok_or_else(|| missing("the level function"))?;
        let (c0, c1) = self.support.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
        let xi = self.threshold.ok_or_else(|| missing("the threshold"))?;
        if !(c0 < c1) || !(c0 < xi && xi < c1) {
            return Err(CovError::InvalidParameter(format!("threshold {xi} must lie inside support ({c0}, {c1})")));
        }
        Ok(SensitivityProblem {
            dim: self.dim,
            weight: self.weight.unwrap_or_else(|| Arc::new(|_: &[f64]| 1.0)),
            level,
            level_gradient,
            density: self.density.ok_or_else(|| missing("the density"))?,
            support: (c0, c1),
            threshold: xi,
        })
    }
}

impl SensitivityProblem {
    pub fn builder(dim: usize) -> ProblemBuilder {
        ProblemBuilder { dim, ..ProblemBuilder::default() }
    }

    pub fn with_threshold(&self, xi: f64) -> Result<Self> {
        let (c0, c1) = self.support;
        if !(c0 < xi && xi < c1) {
            return Err(CovError::InvalidParameter(format!("threshold {xi} must lie inside support ({c0}, {c1})")));
        }
        Ok(Self { threshold: xi, ..self.clone() })
    }
}

struct Segment {
    lo: f64,
    hi: f64,
    scale: f64,
}

/// Ray kernel for positively homogeneous `h` (`h(t x) = t h(x)` for `t > 0`).
#[derive(Clone)]
pub struct HomogeneousKernel {
    problem: SensitivityProblem,
    denominator: Option<ScalarFn>,
    tol: Tolerance,
}

impl HomogeneousKernel {
    /// Validates homogeneity at fixed probe points before accepting `problem`.
    pub fn new(problem: SensitivityProblem) -> Result<Self> {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = StreamFamily::new(0, "homogeneity-probe").path(0);
        let mut x = vec![0.0; problem.dim];
        let mut tx = vec![0.0; problem.dim];
        for _ in 0..4 {
            x.iter_mut().for_each(|v| *v = StandardNormal.sample(&mut rng));
            let hx = (problem.level)(&x);
            for t in [0.5, 2.0, 3.7] {
                tx.iter_mut().zip(&x).for_each(|(a, b)| *a = t * b);
                let observed = (problem.level)(&tx);
                let expected = t * hx;
                if (observed - expected).abs() > 1e-10 * expected.abs().max(1.0) {
                    return Err(CovError::NotHomogeneous { observed, expected });
                }
            }
        }
        Ok(Self { problem, denominator: None, tol: Tolerance::default() })
    }

    /// Replaces the quadrature for the ray normaliser by a closed form in `z`.
    pub fn with_denominator(mut self, denominator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.denominator = Some(Arc::new(denominator));
        self
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn problem(&self) -> &SensitivityProblem {
        &self.problem
    }

    /// Maps `x` to the unit level set, `z = x / h(x)`; `None` when `h(x) = 0`.
    pub fn project(&self, x: &[f64]) -> Option<Vec<f64>> {
        let hx = (self.problem.level)(x);
        if hx.abs() < 1e-300 || !hx.is_finite() {
            return None;
        }
        Some(x.iter().map(|v| v / hx).collect())
    }

    /// `|t|^-(m-1) |grad h(t z)|`.
    pub fn jacobian(&self, z: &[f64], t: f64) -> f64 {
        let m = self.problem.dim;
        let tz: Vec<f64> = z.iter().map(|v| t * v).collect();
        let mut grad = vec![0.0; m];
        (self.problem.level_gradient)(&tz, &mut grad);
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        norm / t.abs().powi(m as i32 - 1)
    }

    fn segments(&self, z: &[f64], upper: f64) -> Vec<Segment> {
        let (c0, c1) = self.problem.support;
        let p = &self.problem;
        let power = p.dim as i32 - 1;
        let mut out = Vec::with_capacity(2);
        let neg: Vec<f64> = z.iter().map(|v| -v).collect();
        let h_neg = (p.level)(&neg);
        if (h_neg + 1.0).abs() <= LEVEL_TOL {
            let hi = c1.min(0.0).min(upper);
            if c0 < hi {
                out.push(Segment { lo: c0, hi, scale: h_neg.abs().powi(power) });
            }
        }
        let h_pos = (p.level)(z);
        if (h_pos - 1.0).abs() <= LEVEL_TOL {
            let lo = c0.max(0.0);
            let hi = c1.min(upper);
            if lo < hi {
                out.push(Segment { lo, hi, scale: h_pos.abs().powi(power) });
            }
        }
        out
    }

    fn ray_integral(&self, z: &[f64], upper: f64, weighted: bool) -> Result<f64> {
        let p = &self.problem;
        let m = p.dim;
        let mut tz = vec![0.0; m];
        let mut grad = vec![0.0; m];
        let mut total = 0.0;
        for seg in self.segments(z, upper) {
            let integrand = |t: f64| {
                tz.iter_mut().zip(z).for_each(|(a, b)| *a = t * b);
                let f = (p.density)(&tz);
                if f == 0.0 {
                    return 0.0;
                }
                (p.level_gradient)(&tz, &mut grad);
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                let g = if weighted { (p.weight)(&tz) } else { 1.0 };
                seg.scale * g * f * t.abs().powi(m as i32 - 1) / norm
            };
            total += integrate(integrand, seg.lo, seg.hi, self.tol)?.value;
        }
        Ok(total)
    }

    /// Normalising integral of the ray density through `z`.
    pub fn denominator(&self, z: &[f64]) -> Result<f64> {
        let d = match &self.denominator {
            Some(closed) => closed(z),
            None => self.ray_integral(z, f64::INFINITY, false)?,
        };
        if !(d > 0.0 && d.is_finite()) {
            return Err(CovError::DegenerateRay(d));
        }
        Ok(d)
    }

    /// Conditional density estimator at the problem threshold.
    pub fn nu(&self, z: &[f64]) -> Result<f64> {
        self.nu_at(z, self.problem.threshold)
    }

    pub fn nu_at(&self, z: &[f64], xi: f64) -> Result<f64> {
        let p = &self.problem;
        let on_fiber = self.segments(z, f64::INFINITY).iter().any(|s| s.lo < xi && xi < s.hi);
        if !on_fiber {
            return Ok(0.0);
        }
        let xz: Vec<f64> = z.iter().map(|v| xi * v).collect();
        let f = (p.density)(&xz);
        if f == 0.0 {
            return Ok(0.0);
        }
        let sign_z: Vec<f64> = z.iter().map(|v| v * xi.signum()).collect();
        let scale = (p.level)(&sign_z).abs().powi(p.dim as i32 - 1);
        let jac = self.jacobian(z, xi);
        if !(jac > 0.0) {
            return Err(CovError::SingularJacobian);
        }
        let numerator = scale * (p.weight)(&xz) * f / jac;
        Ok(numerator / self.denominator(z)?)
    }

    /// Conditional probability estimator at the problem threshold.
    pub fn w(&self, z: &[f64]) -> Result<f64> {
        self.w_at(z, self.problem.threshold)
    }

    pub fn w_at(&self, z: &[f64], xi: f64) -> Result<f64> {
        let numerator = self.ray_integral(z, xi, true)?;
        if numerator == 0.0 {
            return Ok(0.0);
        }
        Ok(numerator / self.denominator(z)?)
    }

    fn run<F>(&self, cfg: &SimConfig, label: &str, sampler: F, value: impl Fn(&Self, &[f64]) -> Result<f64> + Sync) -> Result<(EstimatorOutput, u64)>
    where
        F: Fn(&mut PathRng, &mut [f64]) + Sync,
    {
        let m = self.problem.dim;
        let summary = run_paths(cfg, label, 1, || vec![0.0; m], |rng, x, out| {
            let mut rejected = 0;
            loop {
                sampler(rng, x);
                if let Some(z) = self.project(x) {
                    out[0] = value(self, &z)?;
                    return Ok(rejected);
                }
                rejected += 1;
            }
        })?;
        Ok((summary.moments[0].output()?, summary.rejected))
    }

    /// Monte Carlo estimate of `alpha'(xi)`; draws with `h(X) = 0` are redrawn and counted.
    pub fn estimate_derivative<F>(&self, cfg: &SimConfig, label: &str, sampler: F) -> Result<(EstimatorOutput, u64)>
    where
        F: Fn(&mut PathRng, &mut [f64]) + Sync,
    {
        self.run(cfg, label, sampler, |k, z| k.nu(z))
    }

    /// Monte Carlo estimate of `alpha(xi)` by the conditional probability estimator.
    pub fn estimate_level<F>(&self, cfg: &SimConfig, label: &str, sampler: F) -> Result<(EstimatorOutput, u64)>
    where
        F: Fn(&mut PathRng, &mut [f64]) + Sync,
    {
        self.run(cfg, label, sampler, |k, z| k.w(z))
    }
}

/// Kernel for `h` that is one-to-one in its last coordinate: given the first `m - 1`
/// coordinates `z`, the root `v(z, xi)` of `h(z, v) = xi` is found in `slice`.
#[derive(Clone)]
pub struct Case1Kernel {
    problem: SensitivityProblem,
    slice: (f64, f64),
    inverse: Option<InverseFn>,
    marginal: Option<ScalarFn>,
    tol: Tolerance,
}

impl Case1Kernel {
    pub fn new(problem: SensitivityProblem, slice: (f64, f64)) -> Result<Self> {
        if problem.dim < 2 {
            return Err(CovError::InvalidParameter("conditioning on the last coordinate needs dim >= 2".into()));
        }
        if !(slice.0 < slice.1) {
            return Err(CovError::InvalidParameter(format!("empty slice ({}, {})", slice.0, slice.1)));
        }
        Ok(Self { problem, slice, inverse: None, marginal: None, tol: Tolerance::default() })
    }

    /// Closed-form root `v(z, xi)`; `None` when the line does not meet the level set.
    pub fn with_inverse(mut self, inverse: impl Fn(&[f64], f64) -> Option<f64> + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    /// Closed-form marginal density of the first `m - 1` coordinates.
    pub fn with_marginal(mut self, marginal: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.marginal = Some(Arc::new(marginal));
        self
    }

    pub fn problem(&self) -> &SensitivityProblem {
        &self.problem
    }

    pub fn root(&self, z: &[f64], xi: f64) -> Result<Option<f64>> {
        if let Some(inv) = &self.inverse {
            return Ok(inv(z, xi));
        }
        let mut x = z.to_vec();
        x.push(0.0);
        let level = &self.problem.level;
        let root = root_in_slice(
            |s| {
                x[z.len()] = s;
                level(&x) - xi
            },
            self.slice.0,
            self.slice.1,
        )?;
        if let Some(v) = root {
            x[z.len()] = v;
            let residual = level(&x) - xi;
            if residual.abs() > 1e-10 * xi.abs().max(1.0) {
                return Err(CovError::RootNotFound);
            }
        }
        Ok(root)
    }

    pub fn marginal(&self, z: &[f64]) -> Result<f64> {
        let d = match &self.marginal {
            Some(closed) => closed(z),
            None => {
                let mut x = z.to_vec();
                x.push(0.0);
                let density = &self.problem.density;
                integrate(
                    |s| {
                        x[z.len()] = s;
                        density(&x)
                    },
                    self.slice.0,
                    self.slice.1,
                    self.tol,
                )?
                .value
            }
        };
        if !(d > 0.0 && d.is_finite()) {
            return Err(CovError::DegenerateRay(d));
        }
        Ok(d)
    }

    pub fn nu(&self, z: &[f64]) -> Result<f64> {
        let p = &self.problem;
        let Some(v) = self.root(z, p.threshold)? else {
            return Ok(0.0);
        };
        let mut x = z.to_vec();
        x.push(v);
        let f = (p.density)(&x);
        if f == 0.0 {
            return Ok(0.0);
        }
        let mut grad = vec![0.0; p.dim];
        (p.level_gradient)(&x, &mut grad);
        let slope = grad[p.dim - 1].abs();
        if !(slope > 1e-300) {
            return Err(CovError::SingularJacobian);
        }
        Ok((p.weight)(&x) * f / slope / self.marginal(z)?)
    }

    /// Monte Carlo estimate of `alpha'(xi)` from draws of the full vector; the last coordinate is discarded.
    pub fn estimate_derivative<F>(&self, cfg: &SimConfig, label: &str, sampler: F) -> Result<EstimatorOutput>
    where
        F: Fn(&mut PathRng, &mut [f64]) + Sync,
    {
        let m = self.problem.dim;
        let summary = run_paths(cfg, label, 1, || vec![0.0; m], |rng, x, out| {
            sampler(rng, x);
            out[0] = self.nu(&x[..m - 1])?;
            Ok(0)
        })?;
        summary.moments[0].output()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_pair(xi: f64) -> SensitivityProblem {
        SensitivityProblem::builder(2)
            .weight(|x| x[0])
            .level(|x| x[0] + x[1], |_, g| g.fill(1.0))
            .density(|x| if x[0] > 0.0 && x[1] > 0.0 { (-x[0] - x[1]).exp() } else { 0.0 })
            .support(0.0, f64::INFINITY)
            .threshold(xi)
            .build()
            .unwrap()
    }

    #[test]
    fn builder_rejects_threshold_outside_support() {
        let err = SensitivityProblem::builder(1)
            .level(|x| x[0], |_, g| g[0] = 1.0)
            .density(|_| 1.0)
            .support(0.0, 1.0)
            .threshold(2.0)
            .build();
        assert!(matches!(err, Err(CovError::InvalidParameter(_))));
    }

    #[test]
    fn rejects_non_homogeneous_level() {
        let p = SensitivityProblem::builder(2)
            .level(|x| x[0] * x[0] + x[1], |x, g| {
                g[0] = 2.0 * x[0];
                g[1] = 1.0
            })
            .density(|_| 1.0)
            .threshold(0.5)
            .build()
            .unwrap();
        assert!(matches!(HomogeneousKernel::new(p), Err(CovError::NotHomogeneous { .. })));
    }

    #[test]
    fn sum_of_exponentials_closed_form() {
        let k = HomogeneousKernel::new(exp_pair(1.3)).unwrap();
        let z = [0.25, 0.75];
        // Ray density t e^{-t} / sqrt(2); nu = xi^2 z1 e^{-xi}.
        assert!((k.denominator(&z).unwrap() - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((k.nu(&z).unwrap() - 1.3f64.powi(2) * 0.25 * (-1.3f64).exp()).abs() < 1e-10);
        let closed = k.clone().with_denominator(|_| 0.5f64.sqrt());
        assert!((closed.nu(&z).unwrap() - k.nu(&z).unwrap()).abs() < 1e-10);
        assert_eq!(k.nu_at(&[-0.25, -0.75], 1.3).unwrap(), 0.0);
    }

    #[test]
    fn case1_matches_homogeneous_on_linear_level() {
        let ck = Case1Kernel::new(exp_pair(0.9), (0.0, f64::INFINITY)).unwrap();
        // Conditioning on x1 = 0.4: nu = x1 e^{-0.9} / e^{-0.4}.
        let v = ck.nu(&[0.4]).unwrap();
        assert!((v - 0.4 * (-0.5f64).exp()).abs() < 1e-9);
        assert!(ck.nu(&[1.2]).unwrap() == 0.0);
    }

    #[test]
    fn singular_jacobian_is_reported() {
        let p = SensitivityProblem::builder(2)
            .level(|x| x[0] + x[1].powi(3), |x, g| {
                g[0] = 1.0;
                g[1] = 3.0 * x[1] * x[1]
            })
            .density(|x| crate::special::norm_pdf(x[0]) * crate::special::norm_pdf(x[1]))
            .threshold(0.5)
            .build()
            .unwrap();
        let k = Case1Kernel::new(p, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert_eq!(k.nu(&[0.5]), Err(CovError::SingularJacobian));
        assert!(k.nu(&[0.3]).unwrap() > 0.0);
    }
}
