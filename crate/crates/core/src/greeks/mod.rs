//! Option Greeks by change-of-variables (CoV), likelihood-ratio (LR) and
//! conventional conditional Monte Carlo (CMC) estimators.
//!
//! Every estimator returns delta, vega, theta and gamma from the same paths.
//! Theta is `-dP/dT`.

mod bs;
pub mod oracle;
mod vg;

use std::fmt;

use crate::engine::{run_paths, SimConfig};
use crate::error::{CovError, Result};
use crate::models::{BsModel, BsParams, VgModel, VgParams};
use crate::stats::EstimatorOutput;

pub use oracle::{bs_call, bs_digital, vg_digital};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptionKind {
    Digital,
    AsianDigital,
    BarrierCall,
}

impl fmt::Display for OptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptionKind::Digital => "digital",
            OptionKind::AsianDigital => "asian-digital",
            OptionKind::BarrierCall => "barrier-call",
        })
    }
}

/// Contract terms. `barrier` is the up-and-out level and is only read for barrier calls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    pub kind: OptionKind,
    pub strike: f64,
    pub barrier: Option<f64>,
}

impl OptionSpec {
    pub fn digital(strike: f64) -> Self {
        Self { kind: OptionKind::Digital, strike, barrier: None }
    }

    pub fn asian_digital(strike: f64) -> Self {
        Self { kind: OptionKind::AsianDigital, strike, barrier: None }
    }

    pub fn barrier_call(strike: f64, barrier: f64) -> Self {
        Self { kind: OptionKind::BarrierCall, strike, barrier: Some(barrier) }
    }

    fn payoff(&self) -> Result<Payoff> {
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(CovError::InvalidParameter(format!("strike must be positive, got {}", self.strike)));
        }
        let barrier = match self.kind {
            OptionKind::BarrierCall => {
                let b = self.barrier.ok_or_else(|| CovError::InvalidParameter("barrier call needs a barrier".into()))?;
                if !(b > self.strike && b.is_finite()) {
                    return Err(CovError::InvalidParameter(format!("barrier {b} must be finite and above the strike")));
                }
                b
            }
            _ => f64::INFINITY,
        };
        Ok(Payoff { kind: self.kind, strike: self.strike, barrier })
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Payoff {
    kind: OptionKind,
    strike: f64,
    barrier: f64,
}

impl Payoff {
    fn value(&self, x: &[f64]) -> f64 {
        let xm = x[x.len() - 1];
        match self.kind {
            OptionKind::Digital => (xm >= self.strike) as u8 as f64,
            OptionKind::AsianDigital => (asian_average(x) >= self.strike) as u8 as f64,
            OptionKind::BarrierCall => {
                if barrier_max(x).0 <= self.barrier { (xm - self.strike).max(0.0) } else { 0.0 }
            }
        }
    }
}

pub(crate) fn asian_average(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Running maximum and its 1-based position.
pub(crate) fn barrier_max(x: &[f64]) -> (f64, usize) {
    let mut best = (x[0], 1);
    for (i, &v) in x.iter().enumerate().skip(1) {
        if v > best.0 {
            best = (v, i + 1);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Greek {
    Delta,
    Vega,
    Theta,
    Gamma,
}

impl Greek {
    pub const ALL: [Greek; 4] = [Greek::Delta, Greek::Vega, Greek::Theta, Greek::Gamma];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Greek {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Greek::Delta => "delta",
            Greek::Vega => "vega",
            Greek::Theta => "theta",
            Greek::Gamma => "gamma",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Cov,
    Lr,
    Cmc,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cov => "CoV",
            Method::Lr => "LR",
            Method::Cmc => "CMC",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Bs(BsParams),
    Vg(VgParams),
}

impl Model {
    pub fn steps(&self) -> usize {
        match self {
            Model::Bs(p) => p.steps,
            Model::Vg(p) => p.steps,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Bs(_) => "bs",
            Model::Vg(_) => "vg",
        }
    }
}

/// Exact values of a price and its four Greeks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreekValues {
    pub price: f64,
    pub delta: f64,
    pub vega: f64,
    pub theta: f64,
    pub gamma: f64,
}

impl GreekValues {
    pub fn get(&self, greek: Greek) -> f64 {
        match greek {
            Greek::Delta => self.delta,
            Greek::Vega => self.vega,
            Greek::Theta => self.theta,
            Greek::Gamma => self.gamma,
        }
    }
}

/// Monte Carlo estimates of the four Greeks from one set of paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreekEstimates {
    pub values: [EstimatorOutput; 4],
}

impl GreekEstimates {
    pub fn get(&self, greek: Greek) -> EstimatorOutput {
        self.values[greek.index()]
    }
}

/// Default stream label for a model, contract and method.
pub fn stream_label(model: &Model, option: &OptionSpec, method: Method) -> String {
    format!("greeks/{}/{}/{}/m{}", model.name(), option.kind, method, model.steps())
}

fn unsupported(method: Method, option: &OptionSpec) -> CovError {
    CovError::UnsupportedMethod { method: method.to_string(), target: option.kind.to_string() }
}

/// All four Greeks by `method`, on the stream `label`.
pub fn estimate_greeks_on(model: &Model, option: &OptionSpec, method: Method, cfg: &SimConfig, label: &str) -> Result<GreekEstimates> {
    let payoff = option.payoff()?;
    if method == Method::Cmc && option.kind == OptionKind::BarrierCall {
        return Err(unsupported(method, option));
    }
    let m = model.steps();
    let summary = match model {
        Model::Bs(p) => {
            let bm = BsModel::new(*p)?;
            let ctx = bs::BsCtx::new(&bm, payoff);
            let eval: fn(&bs::BsCtx, &[f64]) -> [f64; 4] = match (method, option.kind) {
                (Method::Cov, OptionKind::Digital) => bs::BsCtx::cov_digital,
                (Method::Cov, OptionKind::AsianDigital) => bs::BsCtx::cov_asian,
                (Method::Cov, OptionKind::BarrierCall) => bs::BsCtx::cov_barrier,
                (Method::Lr, _) => bs::BsCtx::lr,
                (Method::Cmc, OptionKind::Digital) => bs::BsCtx::cmc_digital,
                (Method::Cmc, _) => bs::BsCtx::cmc_asian,
            };
            run_paths(cfg, label, 4, || vec![0.0; m], |rng, x, out| {
                bm.simulate_into(rng, x);
                out.copy_from_slice(&eval(&ctx, x));
                Ok(0)
            })?
        }
        Model::Vg(p) => {
            let vm = VgModel::new(*p)?;
            let ctx = vg::VgCtx::new(&vm, payoff);
            let eval: fn(&vg::VgCtx, &[f64], &[f64]) -> [f64; 4] = match (method, option.kind) {
                (Method::Cov, OptionKind::Digital) => vg::VgCtx::cov_digital,
                (Method::Cov, OptionKind::AsianDigital) => vg::VgCtx::cov_asian,
                (Method::Cov, OptionKind::BarrierCall) => vg::VgCtx::cov_barrier,
                (Method::Lr, _) => vg::VgCtx::lr,
                (Method::Cmc, OptionKind::Digital) => vg::VgCtx::cmc_digital,
                (Method::Cmc, _) => vg::VgCtx::cmc_asian,
            };
            run_paths(cfg, label, 4, || (vec![0.0; m], vec![0.0; m]), |rng, (x, g), out| {
                vm.simulate_into(rng, x, g);
                out.copy_from_slice(&eval(&ctx, x, g));
                Ok(0)
            })?
        }
    };
    let outs = summary.outputs()?;
    Ok(GreekEstimates { values: [outs[0], outs[1], outs[2], outs[3]] })
}

pub fn estimate_greeks(model: &Model, option: &OptionSpec, method: Method, cfg: &SimConfig) -> Result<GreekEstimates> {
    estimate_greeks_on(model, option, method, cfg, &stream_label(model, option, method))
}

pub fn greek_cov(model: &Model, option: &OptionSpec, greek: Greek, cfg: &SimConfig) -> Result<EstimatorOutput> {
    Ok(estimate_greeks(model, option, Method::Cov, cfg)?.get(greek))
}

pub fn greek_lr(model: &Model, option: &OptionSpec, greek: Greek, cfg: &SimConfig) -> Result<EstimatorOutput> {
    Ok(estimate_greeks(model, option, Method::Lr, cfg)?.get(greek))
}

pub fn greek_cmc(model: &Model, option: &OptionSpec, greek: Greek, cfg: &SimConfig) -> Result<EstimatorOutput> {
    Ok(estimate_greeks(model, option, Method::Cmc, cfg)?.get(greek))
}

/// Plain Monte Carlo estimate of the discounted price.
pub fn estimate_price(model: &Model, option: &OptionSpec, cfg: &SimConfig) -> Result<EstimatorOutput> {
    let payoff = option.payoff()?;
    let m = model.steps();
    let label = format!("price/{}/{}/m{}", model.name(), option.kind, m);
    let summary = match model {
        Model::Bs(p) => {
            let bm = BsModel::new(*p)?;
            let disc = (-p.rate * p.maturity).exp();
            run_paths(cfg, &label, 1, || vec![0.0; m], |rng, x, out| {
                bm.simulate_into(rng, x);
                out[0] = disc * payoff.value(x);
                Ok(0)
            })?
        }
        Model::Vg(p) => {
            let vm = VgModel::new(*p)?;
            let disc = (-p.rate * p.maturity).exp();
            run_paths(cfg, &label, 1, || (vec![0.0; m], vec![0.0; m]), |rng, (x, g), out| {
                vm.simulate_into(rng, x, g);
                out[0] = disc * payoff.value(x);
                Ok(0)
            })?
        }
    };
    summary.moments[0].output()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barrier_max_position() {
        assert_eq!(barrier_max(&[1.0, 3.0, 2.0, 3.0]), (3.0, 2));
        assert_eq!(asian_average(&[1.0, 2.0, 3.0]), 2.0);
    }

    #[test]
    fn cmc_barrier_is_unsupported() {
        let model = Model::Bs(BsParams { spot: 100.0, rate: 0.05, sigma: 0.2, maturity: 1.0, steps: 4 });
        let err = estimate_greeks(&model, &OptionSpec::barrier_call(100.0, 120.0), Method::Cmc, &SimConfig::new(100, 1));
        assert!(matches!(err, Err(CovError::UnsupportedMethod { .. })));
    }

    #[test]
    fn invalid_contracts() {
        let model = Model::Bs(BsParams { spot: 100.0, rate: 0.05, sigma: 0.2, maturity: 1.0, steps: 4 });
        let cfg = SimConfig::new(100, 1);
        assert!(estimate_greeks(&model, &OptionSpec::barrier_call(100.0, 90.0), Method::Cov, &cfg).is_err());
        assert!(estimate_greeks(&model, &OptionSpec::digital(-1.0), Method::Cov, &cfg).is_err());
    }
}
