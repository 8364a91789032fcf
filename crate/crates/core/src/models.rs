//! Discretely observed Black-Scholes and variance-gamma price paths.
//!
//! Under the variance-gamma model each step draws a gamma time change
//! `G_i ~ Gamma(shape beta, scale tau / beta)` (mean `tau`, variance `tau^2 / beta`)
//! and sets `X_i = X_{i-1} exp(mu_beta tau + theta G_i + sigma sqrt(G_i) N_i)` with
//! `mu_beta = r + ln(1 - theta beta - sigma^2 beta / 2) / beta`.

use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{CovError, Result};
use crate::rng::PathRng;
use crate::special::norm_ln_pdf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsParams {
    pub spot: f64,
    pub rate: f64,
    pub sigma: f64,
    pub maturity: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VgParams {
    pub spot: f64,
    pub rate: f64,
    pub sigma: f64,
    pub theta: f64,
    pub beta: f64,
    pub maturity: f64,
    pub steps: usize,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond { Ok(()) } else { Err(CovError::InvalidParameter(msg())) }
}

fn check_common(spot: f64, rate: f64, sigma: f64, maturity: f64, steps: usize) -> Result<()> {
    check(spot > 0.0 && spot.is_finite(), || format!("spot must be positive, got {spot}"))?;
    check(rate.is_finite(), || format!("rate must be finite, got {rate}"))?;
    check(sigma > 0.0 && sigma.is_finite(), || format!("sigma must be positive, got {sigma}"))?;
    check(maturity > 0.0 && maturity.is_finite(), || format!("maturity must be positive, got {maturity}"))?;
    check(steps >= 1, || "at least one monitoring date is required".into())
}

/// Log density of a lognormal variable with log-mean `loc` and log-variance `var`.
pub fn lognormal_ln_pdf(y: f64, loc: f64, var: f64) -> f64 {
    if y <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let sd = var.sqrt();
    norm_ln_pdf((y.ln() - loc) / sd) - (y * sd).ln()
}

pub fn lognormal_pdf(y: f64, loc: f64, var: f64) -> f64 {
    lognormal_ln_pdf(y, loc, var).exp()
}

/// Black-Scholes model with precomputed step constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsModel {
    pub params: BsParams,
    pub tau: f64,
    pub mu: f64,
}

impl BsModel {
    pub fn new(params: BsParams) -> Result<Self> {
        check_common(params.spot, params.rate, params.sigma, params.maturity, params.steps)?;
        Ok(Self {
            params,
            tau: params.maturity / params.steps as f64,
            mu: params.rate - 0.5 * params.sigma * params.sigma,
        })
    }

    pub fn simulate_into(&self, rng: &mut PathRng, prices: &mut [f64]) {
        let drift = self.mu * self.tau;
        let vol = self.params.sigma * self.tau.sqrt();
        let mut x = self.params.spot;
        for p in prices.iter_mut() {
            let n: f64 = StandardNormal.sample(rng);
            x *= (drift + vol * n).exp();
            *p = x;
        }
    }

    pub fn simulate(&self, rng: &mut PathRng) -> Vec<f64> {
        let mut prices = vec![0.0; self.params.steps];
        self.simulate_into(rng, &mut prices);
        prices
    }

    pub fn ln_transition_density(&self, next: f64, prev: f64) -> f64 {
        let s2 = self.params.sigma * self.params.sigma * self.tau;
        lognormal_ln_pdf(next, prev.ln() + self.mu * self.tau, s2)
    }

    pub fn transition_density(&self, next: f64, prev: f64) -> f64 {
        self.ln_transition_density(next, prev).exp()
    }
}

/// Variance-gamma model with precomputed step constants.
#[derive(Debug, Clone, Copy)]
pub struct VgModel {
    pub params: VgParams,
    pub tau: f64,
    pub mu_beta: f64,
    /// `1 - theta beta - sigma^2 beta / 2`.
    pub gamma_factor: f64,
    time_change: Gamma<f64>,
}

impl VgModel {
    pub fn new(params: VgParams) -> Result<Self> {
        check_common(params.spot, params.rate, params.sigma, params.maturity, params.steps)?;
        check(params.beta > 0.0 && params.beta.is_finite(), || format!("beta must be positive, got {}", params.beta))?;
        check(params.theta.is_finite(), || "theta must be finite".into())?;
        let gamma_factor = 1.0 - params.theta * params.beta - 0.5 * params.sigma * params.sigma * params.beta;
        check(gamma_factor > 0.0, || format!("1 - theta beta - sigma^2 beta / 2 must be positive, got {gamma_factor}"))?;
        let tau = params.maturity / params.steps as f64;
        let time_change = Gamma::new(params.beta, tau / params.beta).map_err(|e| CovError::InvalidParameter(e.to_string()))?;
        Ok(Self {
            params,
            tau,
            mu_beta: params.rate + gamma_factor.ln() / params.beta,
            gamma_factor,
            time_change,
        })
    }

    pub fn simulate_into(&self, rng: &mut PathRng, prices: &mut [f64], increments: &mut [f64]) {
        let drift = self.mu_beta * self.tau;
        let mut x = self.params.spot;
        for (p, g) in prices.iter_mut().zip(increments.iter_mut()) {
            let gi = self.time_change.sample(rng);
            let n: f64 = StandardNormal.sample(rng);
            x *= (drift + self.params.theta * gi + self.params.sigma * gi.sqrt() * n).exp();
            *p = x;
            *g = gi;
        }
    }

    pub fn simulate(&self, rng: &mut PathRng) -> (Vec<f64>, Vec<f64>) {
        let mut prices = vec![0.0; self.params.steps];
        let mut increments = vec![0.0; self.params.steps];
        self.simulate_into(rng, &mut prices, &mut increments);
        (prices, increments)
    }

    /// Density of the next price given the previous one and the gamma increment `g`.
    pub fn ln_transition_density(&self, next: f64, prev: f64, g: f64) -> f64 {
        let loc = prev.ln() + self.mu_beta * self.tau + self.params.theta * g;
        lognormal_ln_pdf(next, loc, self.params.sigma * self.params.sigma * g)
    }

    pub fn transition_density(&self, next: f64, prev: f64, g: f64) -> f64 {
        self.ln_transition_density(next, prev, g).exp()
    }

    /// `E[X_m]` under this law, `x0 exp(m mu_beta tau) (1 - (theta + sigma^2/2) tau / beta)^(-m beta)`.
    pub fn expected_terminal(&self) -> f64 {
        let p = &self.params;
        let m = p.steps as f64;
        let c = p.theta + 0.5 * p.sigma * p.sigma;
        p.spot * (m * self.mu_beta * self.tau - m * p.beta * (1.0 - c * self.tau / p.beta).ln()).exp()
    }
}

pub fn simulate_bs(params: BsParams, rng: &mut PathRng) -> Result<Vec<f64>> {
    Ok(BsModel::new(params)?.simulate(rng))
}

pub fn simulate_vg(params: VgParams, rng: &mut PathRng) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(VgModel::new(params)?.simulate(rng))
}

pub fn bs_transition_density(params: BsParams, next: f64, prev: f64) -> Result<f64> {
    Ok(BsModel::new(params)?.transition_density(next, prev))
}

pub fn vg_transition_density(params: VgParams, next: f64, prev: f64, g: f64) -> Result<f64> {
    Ok(VgModel::new(params)?.transition_density(next, prev, g))
}
