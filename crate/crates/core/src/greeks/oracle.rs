//! Closed-form and semi-analytic Greeks used as references.

use super::{Greek, GreekValues};
use crate::error::Result;
use crate::models::{VgModel, VgParams, BsParams};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{ln_gamma, norm_cdf, norm_pdf};

fn d2(p: &BsParams, strike: f64) -> f64 {
    let sq = p.sigma * p.maturity.sqrt();
    ((p.spot / strike).ln() + (p.rate - 0.5 * p.sigma * p.sigma) * p.maturity) / sq
}

/// Digital (cash-or-nothing) call paying 1 when `X_T >= K`; theta is `-dP/dT`.
pub fn bs_digital(p: &BsParams, strike: f64) -> GreekValues {
    let (x0, r, s, t) = (p.spot, p.rate, p.sigma, p.maturity);
    let disc = (-r * t).exp();
    let d2 = d2(p, strike);
    let d1 = d2 + s * t.sqrt();
    let pdf = norm_pdf(d2);
    GreekValues {
        price: disc * norm_cdf(d2),
        delta: disc * pdf / (x0 * s * t.sqrt()),
        vega: -disc * pdf * d1 / s,
        theta: r * disc * norm_cdf(d2) - disc * pdf * ((r - 0.5 * s * s) * t - (x0 / strike).ln()) / (2.0 * s * t.powf(1.5)),
        gamma: -disc * pdf * d1 / (x0 * x0 * s * s * t),
    }
}

/// European call; theta is `-dC/dT`.
pub fn bs_call(p: &BsParams, strike: f64) -> GreekValues {
    let (x0, r, s, t) = (p.spot, p.rate, p.sigma, p.maturity);
    let disc = (-r * t).exp();
    let d2 = d2(p, strike);
    let d1 = d2 + s * t.sqrt();
    GreekValues {
        price: x0 * norm_cdf(d1) - strike * disc * norm_cdf(d2),
        delta: norm_cdf(d1),
        vega: x0 * norm_pdf(d1) * t.sqrt(),
        theta: -(x0 * norm_pdf(d1) * s / (2.0 * t.sqrt()) + r * strike * disc * norm_cdf(d2)),
        gamma: norm_pdf(d1) / (x0 * s * t.sqrt()),
    }
}

/// Digital call under variance-gamma by one-dimensional quadrature over the total time change
/// `S ~ Gamma(m beta, tau / beta)`, given which `ln X_m` is normal.
pub fn vg_digital(p: &VgParams, strike: f64) -> Result<GreekValues> {
    let model = VgModel::new(*p)?;
    let (x0, r, s, t, theta) = (p.spot, p.rate, p.sigma, p.maturity, p.theta);
    let disc = (-r * t).exp();
    let shape = p.steps as f64 * p.beta;
    let scale = model.tau / p.beta;
    let ln_norm = -ln_gamma(shape) - shape * scale.ln();
    let mu_b = model.mu_beta;
    let gf = model.gamma_factor;
    let lk = (x0 / strike).ln();
    let eval = |which: Greek, price: bool, v: f64| -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let w = ((shape - 1.0) * v.ln() - v / scale + ln_norm).exp();
        if w == 0.0 {
            return 0.0;
        }
        let sv = s * v.sqrt();
        let d = (lk + mu_b * t + theta * v) / sv;
        if price {
            return w * norm_cdf(d);
        }
        let pdf = norm_pdf(d);
        w * pdf
            * match which {
                Greek::Delta => 1.0 / (x0 * sv),
                Greek::Gamma => -(d + sv) / (x0 * x0 * sv * sv),
                Greek::Vega => -t / (gf * v.sqrt()) - d / s,
                Greek::Theta => (mu_b + theta * v / t) / sv - d / (2.0 * t),
            }
    };
    let tol = Tolerance::relative(1e-10);
    let integral = |which: Greek, price: bool| -> Result<f64> {
        let lo = integrate(|v| eval(which, price, v), 0.0, t, tol)?.value;
        let hi = integrate(|v| eval(which, price, v), t, f64::INFINITY, tol)?.value;
        Ok(lo + hi)
    };
    let price = disc * integral(Greek::Delta, true)?;
    Ok(GreekValues {
        price,
        delta: disc * integral(Greek::Delta, false)?,
        vega: disc * integral(Greek::Vega, false)?,
        theta: r * price - disc * integral(Greek::Theta, false)?,
        gamma: disc * integral(Greek::Gamma, false)?,
    })
}
