//! Per-path Greek samples under variance-gamma. Each returns `[delta, vega, theta, gamma]`.
//!
//! The gamma increments scale with maturity (`dG_i/dT = G_i/T`) and do not depend on sigma.

use super::{asian_average, barrier_max, Payoff};
use crate::models::{lognormal_pdf, VgModel};

pub(crate) struct VgCtx {
    x0: f64,
    r: f64,
    sigma: f64,
    theta: f64,
    t: f64,
    m: usize,
    tau: f64,
    mu_b: f64,
    gamma_factor: f64,
    beta: f64,
    disc: f64,
    pub payoff: Payoff,
}

impl VgCtx {
    pub fn new(model: &VgModel, payoff: Payoff) -> Self {
        let p = model.params;
        Self {
            x0: p.spot,
            r: p.rate,
            sigma: p.sigma,
            theta: p.theta,
            t: p.maturity,
            m: p.steps,
            tau: model.tau,
            mu_b: model.mu_beta,
            gamma_factor: model.gamma_factor,
            beta: p.beta,
            disc: (-p.rate * p.maturity).exp(),
            payoff,
        }
    }

    fn step_density(&self, y: f64, prev: f64, g: f64) -> f64 {
        lognormal_pdf(y, prev.ln() + self.mu_b * self.tau + self.theta * g, self.sigma * self.sigma * g)
    }

    pub fn discounted_payoff(&self, x: &[f64]) -> f64 {
        self.disc * self.payoff.value(x)
    }

    /// Log-price drift through step `i` (1-based) given the partial gamma sum.
    fn drift(&self, i: usize, g_sum: f64) -> f64 {
        self.mu_b * i as f64 * self.tau + self.theta * g_sum
    }

    /// Sigma sensitivity of `ln X_i` at fixed standardised noise, divided out of the log term.
    fn vega_term(&self, log_ratio: f64, i: usize, g_sum: f64) -> f64 {
        (log_ratio - self.drift(i, g_sum)) / self.sigma - self.sigma * i as f64 * self.tau / self.gamma_factor
    }

    fn gamma_term(&self, y: f64, g1: f64) -> f64 {
        let s2 = self.sigma * self.sigma * g1;
        ((y / self.x0).ln() - (self.mu_b * self.tau + self.theta * g1 + s2)) / (self.x0 * self.x0 * s2)
    }

    pub fn cov_digital(&self, x: &[f64], g: &[f64]) -> [f64; 4] {
        let (x0, k, t, m) = (self.x0, self.payoff.strike, self.t, self.m);
        let xm = x[m - 1];
        let s_g: f64 = g.iter().sum();
        let y = x[0] * k / xm;
        let base = self.disc * y * self.step_density(y, x0, g[0]);
        let ln_k = (k / x0).ln();
        let itm = if xm >= k { 1.0 } else { 0.0 };
        [
            base / x0,
            base * self.vega_term(ln_k, m, s_g),
            self.r * self.disc * itm - base * (ln_k + self.drift(m, s_g)) / (2.0 * t),
            base * self.gamma_term(y, g[0]),
        ]
    }

    pub fn cov_asian(&self, x: &[f64], g: &[f64]) -> [f64; 4] {
        let (x0, k, t) = (self.x0, self.payoff.strike, self.t);
        let xbar = asian_average(x);
        let y = x[0] * k / xbar;
        let base = self.disc * y * self.step_density(y, x0, g[0]);
        let itm = if xbar >= k { 1.0 } else { 0.0 };
        let (mut th, mut ve, mut g_sum) = (0.0, 0.0, 0.0);
        for (i, (&xi, &gi)) in x.iter().zip(g).enumerate() {
            g_sum += gi;
            let w = xi / xbar;
            let l = (k * xi / (x0 * xbar)).ln();
            th += w * (l + self.drift(i + 1, g_sum));
            ve += w * self.vega_term(l, i + 1, g_sum);
        }
        let m = self.m as f64;
        [
            base / x0,
            base / m * ve,
            self.r * self.disc * itm - base / (2.0 * m * t) * th,
            base * self.gamma_term(y, g[0]),
        ]
    }

    pub fn cov_barrier(&self, x: &[f64], g: &[f64]) -> [f64; 4] {
        let (x0, k, t, m) = (self.x0, self.payoff.strike, self.t, self.m);
        let kappa = self.payoff.barrier;
        let (xhat, istar) = barrier_max(x);
        let xm = x[m - 1];
        let s_g: f64 = g.iter().sum();
        let g_star: f64 = g[..istar].iter().sum();
        let alive = xhat <= kappa;
        let a = if alive && xm >= k { self.disc * xm } else { 0.0 };
        let y = x[0] * kappa / xhat;
        let fb = self.step_density(y, x0, g[0]);
        let bb = self.disc * y * fb * (xm * kappa / xhat - k).max(0.0);
        let ln_m = (xm / x0).ln();
        let ln_b = (kappa / x0).ln();
        let delta = (a - bb) / x0;
        let theta = self.r * self.disc * if alive { (xm - k).max(0.0) } else { 0.0 } - a / (2.0 * t) * (ln_m + self.drift(m, s_g))
            + bb / (2.0 * t) * (ln_b + self.drift(istar, g_star));
        let vega = a * self.vega_term(ln_m, m, s_g) - bb * self.vega_term(ln_b, istar, g_star);
        let y_k = x[0] * k / xm;
        let g1 = if k * xhat / xm <= kappa { self.disc * k * k * x[0] * self.step_density(y_k, x0, g[0]) / (x0 * x0 * xm) } else { 0.0 };
        let g2 = if kappa * xm / xhat >= k { self.disc * kappa * kappa * x[0] * xm * fb / (x0 * x0 * xhat * xhat) } else { 0.0 };
        let g3 = bb * self.gamma_term(y, g[0]);
        [delta, vega, theta, g1 - g2 - g3]
    }

    /// The maturity score is taken on the joint law of prices and gamma increments,
    /// so it includes the gamma-density term `beta (G_i - tau) / (tau T)`.
    pub fn lr(&self, x: &[f64], g: &[f64]) -> [f64; 4] {
        let (x0, s, t) = (self.x0, self.sigma, self.t);
        let pay = self.discounted_payoff(x);
        let mf = self.m as f64;
        let mut prev = x0;
        let mut l3 = 0.0;
        let mut l4 = -mf / s;
        let mut e1 = 0.0;
        for (i, (&xi, &gi)) in x.iter().zip(g).enumerate() {
            let e = (xi / prev).ln() - self.mu_b * self.tau - self.theta * gi;
            if i == 0 {
                e1 = e;
            }
            let s2g = s * s * gi;
            l3 += e * self.mu_b / (mf * s2g) + self.beta * (gi - self.tau) / (self.tau * t);
            l4 += e * e / (s2g * s) - e * self.tau / (s * gi * self.gamma_factor);
            prev = xi;
        }
        let s2g1 = s * s * g[0];
        let l1 = e1 / (x0 * s2g1);
        let l2 = l1 * l1 - (e1 + 1.0) / (x0 * x0 * s2g1);
        [pay * l1, pay * l4, self.r * pay - pay * l3, pay * l2]
    }

    pub fn cmc_digital(&self, x: &[f64], g: &[f64]) -> [f64; 4] {
        let (x0, k, t, m) = (self.x0, self.payoff.strike, self.t, self.m);
        let prev = if m >= 2 { x[m - 2] } else { x0 };
        let gm = g[m - 1];
        let s_g: f64 = g.iter().sum();
        let base = self.disc * k * self.step_density(k, prev, gm);
        let ln_k = (k / x0).ln();
        let itm = if x[m - 1] >= k { 1.0 } else { 0.0 };
        let s2 = self.sigma * self.sigma * gm;
        [
            base / x0,
            base * self.vega_term(ln_k, m, s_g),
            self.r * self.disc * itm - base * (ln_k + self.drift(m, s_g)) / (2.0 * t),
            base * ((k / prev).ln() - (self.mu_b * self.tau + self.theta * gm + s2)) / (x0 * x0 * s2),
        ]
    }

    pub fn cmc_asian(&self, x: &[f64], g: &[f64]) -> [f64; 4] {
        let (x0, k, t, m) = (self.x0, self.payoff.strike, self.t, self.m);
        let mf = m as f64;
        let itm = if asian_average(x) >= k { 1.0 } else { 0.0 };
        let head = &x[..m - 1];
        let s_minus: f64 = head.iter().sum();
        let sm = mf * k - s_minus;
        if sm <= 0.0 {
            return [0.0, 0.0, self.r * self.disc * itm, 0.0];
        }
        let prev = if m >= 2 { x[m - 2] } else { x0 };
        let gm = g[m - 1];
        let s_g: f64 = g.iter().sum();
        let f = self.step_density(sm, prev, gm);
        let ln_s = (sm / x0).ln();
        let mut th = sm * (ln_s + self.drift(m, s_g));
        let mut ve = sm * self.vega_term(ln_s, m, s_g);
        let mut g_sum = 0.0;
        for (i, (&xi, &gi)) in head.iter().zip(g).enumerate() {
            g_sum += gi;
            let l = (xi / x0).ln();
            th += xi * (l + self.drift(i + 1, g_sum));
            ve += xi * self.vega_term(l, i + 1, g_sum);
        }
        let s2 = self.sigma * self.sigma * gm;
        let delta = self.disc * mf * k * f / x0;
        let gamma = self.disc * mf * k * f / (x0 * x0)
            * (-1.0 + s_minus / sm + mf * k * ((sm / prev).ln() - (self.mu_b * self.tau + self.theta * gm)) / (s2 * sm));
        [delta, self.disc * f * ve, self.r * self.disc * itm - self.disc * f / (2.0 * t) * th, gamma]
    }
}
