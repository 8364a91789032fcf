//! Gradient of a linear chance constraint `P(t'X <= b)` with respect to `t`,
//! for `X` multivariate normal or multivariate Student-t with scale matrix `Sigma`.

use nalgebra::{DMatrix, DVector};
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::engine::{run_paths, SimConfig};
use crate::error::{CovError, Result};
use crate::rng::PathRng;
use crate::special::{ln_gamma, norm_pdf, norm_quantile, student_pdf, student_quantile};
use crate::stats::EstimatorOutput;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CcpDistribution {
    Normal,
    StudentT { dof: f64 },
}

#[derive(Debug, Clone)]
pub struct CcpInstance {
    pub cov: DMatrix<f64>,
    pub weights: Vec<f64>,
    pub level: f64,
    pub dist: CcpDistribution,
    lower: DMatrix<f64>,
    chi: Option<ChiSquared<f64>>,
}

/// CoV gradient estimate with the number of draws discarded because `t'X` vanished.
#[derive(Debug, Clone, PartialEq)]
pub struct CcpGradient {
    pub components: Vec<EstimatorOutput>,
    pub rejected: u64,
}

impl CcpInstance {
    pub fn new(cov: DMatrix<f64>, weights: Vec<f64>, level: f64, dist: CcpDistribution) -> Result<Self> {
        let m = weights.len();
        if m == 0 || cov.nrows() != m || cov.ncols() != m {
            return Err(CovError::InvalidParameter(format!("covariance must be {m}x{m}")));
        }
        if !level.is_finite() || weights.iter().any(|w| !w.is_finite()) || weights.iter().all(|&w| w == 0.0) {
            return Err(CovError::InvalidParameter("weights must be finite and not all zero, level finite".into()));
        }
        let chi = match dist {
            CcpDistribution::Normal => None,
            CcpDistribution::StudentT { dof } => {
                Some(ChiSquared::new(dof).map_err(|_| CovError::InvalidParameter(format!("degrees of freedom must be positive, got {dof}")))?)
            }
        };
        let lower = cov.clone().cholesky().ok_or(CovError::NotPositiveDefinite)?.unpack();
        Ok(Self { cov, weights, level, dist, lower, chi })
    }

    /// Unit weights with unit variances and common correlation `rho`.
    pub fn equicorrelated(m: usize, rho: f64, level: f64, dist: CcpDistribution) -> Result<Self> {
        let cov = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { rho });
        Self::new(cov, vec![1.0; m], level, dist)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Same instance with weights and level multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.cov.clone(), self.weights.iter().map(|w| c * w).collect(), c * self.level, self.dist)
    }

    /// Standard deviation scale of `t'X`, `sqrt(t' Sigma t)`.
    pub fn weight_scale(&self) -> f64 {
        self.sigma_t().0
    }

    fn sigma_t(&self) -> (f64, DVector<f64>) {
        let t = DVector::from_column_slice(&self.weights);
        let st = &self.cov * &t;
        (t.dot(&st).sqrt(), st)
    }

    /// Exact gradient `d/dt P(t'X <= b)`.
    pub fn exact_gradient(&self) -> Vec<f64> {
        let (s, st) = self.sigma_t();
        let u = self.level / s;
        let pdf = match self.dist {
            CcpDistribution::Normal => norm_pdf(u),
            CcpDistribution::StudentT { dof } => student_pdf(u, dof),
        };
        st.iter().map(|v| -u * pdf * v / (s * s)).collect()
    }

    fn draw(&self, rng: &mut PathRng, normals: &mut DVector<f64>, y: &mut DVector<f64>) -> f64 {
        normals.iter_mut().for_each(|v| *v = StandardNormal.sample(rng));
        self.lower.mul_to(normals, y);
        match &self.chi {
            None => 1.0,
            Some(chi) => {
                let dof = match self.dist {
                    CcpDistribution::StudentT { dof } => dof,
                    CcpDistribution::Normal => unreachable!(),
                };
                let c: f64 = chi.sample(rng);
                (dof / c).sqrt()
            }
        }
    }

    /// `ln` of `|b|^m` times the ray normalising factor evaluated at `q = z' Sigma^-1 z`.
    fn ln_ray_factor(&self, q: f64) -> f64 {
        let m = self.dim() as f64;
        let b = self.level;
        let ln_b = m * b.abs().ln();
        match self.dist {
            CcpDistribution::Normal => ln_b - 0.5 * q * b * b + 0.5 * m * q.ln() - 0.5 * m * std::f64::consts::LN_2 - ln_gamma(0.5 * m),
            CcpDistribution::StudentT { dof } => {
                ln_b + ln_gamma(0.5 * (dof + m)) + 0.5 * m * q.ln() - 0.5 * (dof + m) * (q * b * b / dof).ln_1p() - 0.5 * m * dof.ln()
                    - ln_gamma(0.5 * m)
                    - ln_gamma(0.5 * dof)
            }
        }
    }
}

/// CoV estimate of the full gradient.
pub fn ccp_cov(inst: &CcpInstance, cfg: &SimConfig) -> Result<CcpGradient> {
    let m = inst.dim();
    let label = format!("ccp/cov/{:?}/m{m}", inst.dist);
    let init = || (DVector::<f64>::zeros(m), DVector::<f64>::zeros(m));
    let summary = run_paths(cfg, &label, m, init, |rng, (normals, y), out| {
        let mut rejected = 0;
        loop {
            let scale = inst.draw(rng, normals, y);
            *y *= scale;
            let s: f64 = y.iter().zip(&inst.weights).map(|(a, b)| a * b).sum();
            if s.abs() < 1e-300 {
                rejected += 1;
                continue;
            }
            *y /= s;
            if inst.level == 0.0 {
                out.fill(0.0);
                return Ok(rejected);
            }
            normals.copy_from(y);
            if !inst.lower.solve_lower_triangular_mut(normals) {
                return Err(CovError::NotPositiveDefinite);
            }
            let q = normals.norm_squared();
            let factor = inst.ln_ray_factor(q).exp();
            for (o, z) in out.iter_mut().zip(y.iter()) {
                *o = -inst.level.signum() * z * factor;
            }
            return Ok(rejected);
        }
    })?;
    Ok(CcpGradient { components: summary.outputs()?, rejected: summary.rejected })
}

/// Conditioning constants for the first gradient component given `W = sum_{k >= 2} t_k X_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmcKernel {
    t1: f64,
    a11: f64,
    a12: f64,
}

impl CmcKernel {
    pub fn new(inst: &CcpInstance) -> Result<Self> {
        let m = inst.dim();
        let t1 = inst.weights[0];
        if m < 2 || t1 <= 0.0 {
            return Err(CovError::UnsupportedMethod { method: "CMC".into(), target: "chance constraint with m < 2 or t_1 <= 0".into() });
        }
        let c = &inst.cov;
        let tail = &inst.weights[1..];
        let v11 = c[(0, 0)];
        let v12: f64 = tail.iter().enumerate().map(|(k, w)| w * c[(0, k + 1)]).sum();
        let v22: f64 = tail
            .iter()
            .enumerate()
            .map(|(j, wj)| tail.iter().enumerate().map(|(k, wk)| wj * wk * c[(j + 1, k + 1)]).sum::<f64>())
            .sum();
        let det = v11 * v22 - v12 * v12;
        if !(det > 0.0) {
            return Err(CovError::NotPositiveDefinite);
        }
        Ok(Self { t1, a11: v22 / det, a12: -v12 / det })
    }

    /// `d/dt_1 P(t_1 Y_1 <= level - w | W = w)` for the Gaussian factor `Y`.
    pub fn conditional(&self, w: f64, level: f64) -> f64 {
        let sa = self.a11.sqrt();
        let r = level - w;
        -sa * r / (self.t1 * self.t1) * norm_pdf(sa * (r / self.t1 + self.a12 / self.a11 * w))
    }
}

/// Conventional conditional Monte Carlo estimate of the first gradient component.
/// For the t case the Gaussian factor is conditioned on with the level rescaled by `sqrt(chi^2 / v)`.
pub fn ccp_cmc(inst: &CcpInstance, cfg: &SimConfig) -> Result<EstimatorOutput> {
    let m = inst.dim();
    let kernel = CmcKernel::new(inst)?;
    let tail = &inst.weights[1..];
    let label = format!("ccp/cmc/{:?}/m{m}", inst.dist);
    let init = || (DVector::<f64>::zeros(m), DVector::<f64>::zeros(m));
    let summary = run_paths(cfg, &label, 1, init, |rng, (normals, y), out| {
        let scale = inst.draw(rng, normals, y);
        let w: f64 = y.iter().skip(1).zip(tail).map(|(a, b)| a * b).sum();
        out[0] = kernel.conditional(w, inst.level / scale);
        Ok(0)
    })?;
    summary.moments[0].output()
}

/// Plain Monte Carlo estimate of `P(t'X <= b)`.
pub fn ccp_probability(inst: &CcpInstance, cfg: &SimConfig) -> Result<EstimatorOutput> {
    let m = inst.dim();
    let label = format!("ccp/probability/{:?}/m{m}", inst.dist);
    let init = || (DVector::<f64>::zeros(m), DVector::<f64>::zeros(m));
    let summary = run_paths(cfg, &label, 1, init, |rng, (normals, y), out| {
        let scale = inst.draw(rng, normals, y);
        let s: f64 = y.iter().zip(&inst.weights).map(|(a, b)| a * b).sum::<f64>() * scale;
        out[0] = if s <= inst.level { 1.0 } else { 0.0 };
        Ok(0)
    })?;
    summary.moments[0].output()
}

/// Level `b` with `P(t'X <= b) = prob` for unit weights and equicorrelation `rho`.
pub fn find_b_for_level(m: usize, rho: f64, prob: f64, dist: CcpDistribution) -> f64 {
    let mf = m as f64;
    let s = (mf + mf * (mf - 1.0) * rho).sqrt();
    s * match dist {
        CcpDistribution::Normal => norm_quantile(prob),
        CcpDistribution::StudentT { dof } => student_quantile(prob, dof),
    }
}
