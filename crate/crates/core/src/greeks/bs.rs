//! Per-path Greek samples under Black-Scholes. Each returns `[delta, vega, theta, gamma]`.

use super::{asian_average, barrier_max, Payoff};
use crate::models::{lognormal_pdf, BsModel};

pub(crate) struct BsCtx {
    x0: f64,
    r: f64,
    sigma: f64,
    t: f64,
    m: usize,
    tau: f64,
    mu: f64,
    disc: f64,
    s2tau: f64,
    pub payoff: Payoff,
}

impl BsCtx {
    pub fn new(model: &BsModel, payoff: Payoff) -> Self {
        let p = model.params;
        Self {
            x0: p.spot,
            r: p.rate,
            sigma: p.sigma,
            t: p.maturity,
            m: p.steps,
            tau: model.tau,
            mu: model.mu,
            disc: (-p.rate * p.maturity).exp(),
            s2tau: p.sigma * p.sigma * model.tau,
            payoff,
        }
    }

    /// Density of `X_1` given `x0`.
    fn f1(&self, y: f64) -> f64 {
        lognormal_pdf(y, self.x0.ln() + self.mu * self.tau, self.s2tau)
    }

    /// Density of the next price at `y` given the previous price.
    fn step_density(&self, y: f64, prev: f64) -> f64 {
        lognormal_pdf(y, prev.ln() + self.mu * self.tau, self.s2tau)
    }

    fn vol_drift(&self) -> f64 {
        self.mu + self.sigma * self.sigma
    }

    pub fn discounted_payoff(&self, x: &[f64]) -> f64 {
        self.disc * self.payoff.value(x)
    }

    pub fn cov_digital(&self, x: &[f64]) -> [f64; 4] {
        let (x0, k, t) = (self.x0, self.payoff.strike, self.t);
        let xm = x[self.m - 1];
        let y = x[0] * k / xm;
        let base = self.disc * y * self.f1(y);
        let ln_k = (k / x0).ln();
        let itm = if xm >= k { 1.0 } else { 0.0 };
        let delta = base / x0;
        let vega = base * (ln_k - self.vol_drift() * t) / self.sigma;
        let theta = self.r * self.disc * itm - base * (self.mu * t + ln_k) / (2.0 * t);
        let gamma = base / (x0 * x0 * self.s2tau) * ((y / x0).ln() - self.vol_drift() * self.tau);
        [delta, vega, theta, gamma]
    }

    pub fn cov_asian(&self, x: &[f64]) -> [f64; 4] {
        let (x0, k, t) = (self.x0, self.payoff.strike, self.t);
        let xbar = asian_average(x);
        let y = x[0] * k / xbar;
        let base = self.disc * y * self.f1(y);
        let itm = if xbar >= k { 1.0 } else { 0.0 };
        let (mut th, mut ve) = (0.0, 0.0);
        for (i, &xi) in x.iter().enumerate() {
            let it = (i + 1) as f64 * self.tau;
            let w = xi / xbar;
            let l = (xi * k / (x0 * xbar)).ln();
            th += w * (l + self.mu * it);
            ve += w * (l - self.vol_drift() * it);
        }
        let m = self.m as f64;
        let delta = base / x0;
        let vega = base / (m * self.sigma) * ve;
        let theta = self.r * self.disc * itm - base / (2.0 * m * t) * th;
        let gamma = base / (x0 * x0 * self.s2tau) * ((y / x0).ln() - self.vol_drift() * self.tau);
        [delta, vega, theta, gamma]
    }

    pub fn cov_barrier(&self, x: &[f64]) -> [f64; 4] {
        let (x0, k, t) = (self.x0, self.payoff.strike, self.t);
        let kappa = self.payoff.barrier;
        let (xhat, istar) = barrier_max(x);
        let xm = x[self.m - 1];
        let alive = xhat <= kappa;
        let a = if alive && xm >= k { self.disc * xm } else { 0.0 };
        let y = x[0] * kappa / xhat;
        let fb = self.f1(y);
        let moved = (xm * kappa / xhat - k).max(0.0);
        let bb = self.disc * y * fb * moved;
        let it = istar as f64 * self.tau;
        let ln_m = (xm / x0).ln();
        let ln_b = (kappa / x0).ln();
        let vd = self.vol_drift();
        let delta = (a - bb) / x0;
        let theta = self.r * self.disc * if alive { (xm - k).max(0.0) } else { 0.0 } - a / (2.0 * t) * (ln_m + self.mu * t)
            + bb / (2.0 * t) * (ln_b + self.mu * it);
        let vega = a * (ln_m - vd * t) / self.sigma - bb * (ln_b - vd * it) / self.sigma;
        let y_k = x[0] * k / xm;
        let g1 = if xhat * k / xm <= kappa { self.disc * k * k * x[0] * self.f1(y_k) / (xm * x0 * x0) } else { 0.0 };
        let g2 = if xm * kappa / xhat >= k { self.disc * x[0] * xm * kappa * kappa / (x0 * x0 * xhat * xhat) * fb } else { 0.0 };
        let g3 = bb / (x0 * x0 * self.s2tau) * ((y / x0).ln() - vd * self.tau);
        [delta, vega, theta, g1 - g2 - g3]
    }

    /// Likelihood-ratio weights applied to the discounted payoff.
    pub fn lr(&self, x: &[f64]) -> [f64; 4] {
        let x0 = self.x0;
        let pay = self.discounted_payoff(x);
        let (s, s2tau, tau) = (self.sigma, self.s2tau, self.tau);
        let mut prev = x0;
        let (mut l3, mut l4) = (0.0, 0.0);
        let mut d1 = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let d = (xi / prev).ln() - self.mu * tau;
            if i == 0 {
                d1 = d;
            }
            l3 += d * d / (2.0 * s2tau * tau) + self.mu * d / s2tau - 0.5 / tau;
            l4 += d * d / (s2tau * s) - d / s - 1.0 / s;
            prev = xi;
        }
        l3 /= self.m as f64;
        let l1 = d1 / (x0 * s2tau);
        let l2 = l1 * l1 - (d1 + 1.0) / (x0 * x0 * s2tau);
        [pay * l1, pay * l4, self.r * pay - pay * l3, pay * l2]
    }

    pub fn cmc_digital(&self, x: &[f64]) -> [f64; 4] {
        let (x0, k, t) = (self.x0, self.payoff.strike, self.t);
        let prev = if self.m >= 2 { x[self.m - 2] } else { x0 };
        let base = self.disc * k * self.step_density(k, prev);
        let ln_k = (k / x0).ln();
        let itm = if x[self.m - 1] >= k { 1.0 } else { 0.0 };
        let vd = self.vol_drift();
        [
            base / x0,
            base * (ln_k - vd * t) / self.sigma,
            self.r * self.disc * itm - base * (ln_k + self.mu * t) / (2.0 * t),
            base * ((k / prev).ln() - vd * self.tau) / (x0 * x0 * self.s2tau),
        ]
    }

    pub fn cmc_asian(&self, x: &[f64]) -> [f64; 4] {
        let (x0, k, t) = (self.x0, self.payoff.strike, self.t);
        let m = self.m;
        let mf = m as f64;
        let itm = if asian_average(x) >= k { 1.0 } else { 0.0 };
        let head = &x[..m - 1];
        let s_minus: f64 = head.iter().sum();
        let sm = mf * k - s_minus;
        if sm <= 0.0 {
            return [0.0, 0.0, self.r * self.disc * itm, 0.0];
        }
        let prev = if m >= 2 { x[m - 2] } else { x0 };
        let f = self.step_density(sm, prev);
        let vd = self.vol_drift();
        let (mut th, mut ve) = (sm * ((sm / x0).ln() + self.mu * t), sm * ((sm / x0).ln() - vd * t));
        for (i, &xi) in head.iter().enumerate() {
            let it = (i + 1) as f64 * self.tau;
            th += xi * ((xi / x0).ln() + self.mu * it);
            ve += xi * ((xi / x0).ln() - vd * it);
        }
        let delta = self.disc * mf * k * f / x0;
        let gamma = self.disc * mf * k * f / (sm * x0 * x0)
            * (s_minus - sm + mf * k * ((sm / prev).ln() - self.mu * self.tau) / self.s2tau);
        [delta, self.disc * f / self.sigma * ve, self.r * self.disc * itm - self.disc * f / (2.0 * t) * th, gamma]
    }
}
