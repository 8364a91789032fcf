//! Experiment spec files (TOML).
//!
//! ```toml
//! id = "table1"
//! title = "Digital option, Black-Scholes"
//! n = 100000
//! seed = 1
//!
//! [greeks]
//! steps = [10, 50, 100]
//! methods = ["LR", "CMC", "CoV"]
//! model = { name = "bs", spot = 100.0, rate = 0.05, sigma = 0.3, maturity = 1.0 }
//! option = { kind = "digital", strike = 100.0 }
//! reference = { source = "analytic" }
//! ```
//!
//! A `[ccp]` table replaces `[greeks]` for chance-constraint experiments.

use std::path::Path;

use covmc_core::ccp::CcpDistribution;
use covmc_core::greeks::{Method, Model, OptionKind, OptionSpec};
use covmc_core::models::{BsParams, VgParams};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::presets;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub n: u64,
    pub seed: u64,
    pub greeks: Option<GreeksStudy>,
    pub ccp: Option<CcpStudy>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MethodName {
    #[serde(rename = "CoV")]
    Cov,
    #[serde(rename = "LR")]
    Lr,
    #[serde(rename = "CMC")]
    Cmc,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Cov => Method::Cov,
            MethodName::Lr => Method::Lr,
            MethodName::Cmc => Method::Cmc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreeksStudy {
    pub steps: Vec<usize>,
    pub methods: Vec<MethodName>,
    pub model: ModelSpec,
    pub option: OptionTerms,
    pub reference: ReferenceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: ModelName,
    pub spot: f64,
    pub rate: f64,
    pub sigma: f64,
    pub maturity: f64,
    pub theta: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Bs,
    Vg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionTerms {
    pub kind: OptionKindName,
    pub strike: f64,
    pub barrier: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptionKindName {
    Digital,
    AsianDigital,
    BarrierCall,
}

/// Where the true values used as RE denominators come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReferenceSpec {
    /// Closed-form or one-dimensional quadrature values registered for the configuration.
    Analytic,
    /// Fresh large-sample run of non-CoV methods, combined by inverse variance.
    LargeSample { n_ref: u64, methods: Vec<MethodName> },
    /// Values produced earlier by `covmc reference`, one entry per step count.
    Tabulated { generated_by: String, values: Vec<TabulatedValues> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedValues {
    pub steps: usize,
    pub delta: f64,
    pub vega: f64,
    pub theta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcpStudy {
    pub distribution: DistributionName,
    pub dof: Option<f64>,
    pub rho: f64,
    pub dims: Vec<usize>,
    pub levels: Vec<f64>,
    pub methods: Vec<MethodName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionName {
    Normal,
    T,
}

fn spec_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Spec(msg.into())
}

impl ModelSpec {
    pub fn model(&self, steps: usize) -> Result<Model> {
        Ok(match self.name {
            ModelName::Bs => Model::Bs(BsParams { spot: self.spot, rate: self.rate, sigma: self.sigma, maturity: self.maturity, steps }),
            ModelName::Vg => Model::Vg(VgParams {
                spot: self.spot,
                rate: self.rate,
                sigma: self.sigma,
                theta: self.theta.ok_or_else(|| spec_err("variance-gamma model needs theta"))?,
                beta: self.beta.ok_or_else(|| spec_err("variance-gamma model needs beta"))?,
                maturity: self.maturity,
                steps,
            }),
        })
    }
}

impl OptionTerms {
    pub fn option(&self) -> OptionSpec {
        let kind = match self.kind {
            OptionKindName::Digital => OptionKind::Digital,
            OptionKindName::AsianDigital => OptionKind::AsianDigital,
            OptionKindName::BarrierCall => OptionKind::BarrierCall,
        };
        OptionSpec { kind, strike: self.strike, barrier: self.barrier }
    }
}

impl CcpStudy {
    pub fn distribution(&self) -> Result<CcpDistribution> {
        match (self.distribution, self.dof) {
            (DistributionName::Normal, None) => Ok(CcpDistribution::Normal),
            (DistributionName::T, Some(dof)) if dof > 2.0 => Ok(CcpDistribution::StudentT { dof }),
            (DistributionName::T, _) => Err(spec_err("t distribution needs dof > 2")),
            (DistributionName::Normal, Some(_)) => Err(spec_err("dof is only valid for the t distribution")),
        }
    }
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| spec_err(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Loads a preset by id, or a spec file by path.
    pub fn load(id_or_path: &str) -> Result<Self> {
        if let Some(text) = presets::get(id_or_path) {
            return Self::parse(text);
        }
        let path = Path::new(id_or_path);
        if !path.exists() {
            return Err(spec_err(format!("unknown experiment '{id_or_path}' (not a preset id or a file)")));
        }
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 100 {
            return Err(spec_err(format!("n must be at least 100, got {}", self.n)));
        }
        match (&self.greeks, &self.ccp) {
            (Some(g), None) => {
                if g.steps.is_empty() || g.steps.contains(&0) {
                    return Err(spec_err("steps must be a non-empty list of positive integers"));
                }
                if g.methods.is_empty() {
                    return Err(spec_err("at least one method is required"));
                }
                g.model.model(g.steps[0])?;
                match &g.reference {
                    ReferenceSpec::LargeSample { n_ref, methods } => {
                        if *n_ref < 10 * self.n {
                            return Err(spec_err(format!("n_ref must be at least 10 n = {}, got {n_ref}", 10 * self.n)));
                        }
                        if methods.is_empty() || methods.contains(&MethodName::Cov) {
                            return Err(spec_err("reference methods must be non-empty and must not include CoV"));
                        }
                    }
                    ReferenceSpec::Tabulated { values, .. } => {
                        for m in &g.steps {
                            if !values.iter().any(|v| v.steps == *m) {
                                return Err(spec_err(format!("no tabulated reference for m = {m}")));
                            }
                        }
                    }
                    ReferenceSpec::Analytic => {}
                }
                Ok(())
            }
            (None, Some(c)) => {
                c.distribution()?;
                if c.dims.is_empty() || c.dims.contains(&0) || c.levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) || c.levels.is_empty() {
                    return Err(spec_err("dims must be positive and levels inside (0, 1)"));
                }
                if !(c.rho > -1.0 && c.rho < 1.0) {
                    return Err(spec_err("rho must lie in (-1, 1)"));
                }
                if c.methods.is_empty() || c.methods.contains(&MethodName::Lr) {
                    return Err(spec_err("chance-constraint methods are CoV and CMC"));
                }
                Ok(())
            }
            _ => Err(spec_err("exactly one of [greeks] or [ccp] is required")),
        }
    }
}
