use covmc_core::ccp::{ccp_cmc, ccp_cov, find_b_for_level, CcpInstance};
use covmc_core::greeks::{estimate_greeks_on, oracle, stream_label, Greek, GreekValues, Method, Model, OptionKind, OptionSpec};
use covmc_core::{EstimatorOutput, SimConfig};

use crate::error::{HarnessError, Result};
use crate::spec::{CcpStudy, ExperimentSpec, GreeksStudy, MethodName, ReferenceSpec, TabulatedValues};

/// One estimator column of a table row.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub column: String,
    pub output: EstimatorOutput,
    pub reference: f64,
}

impl Cell {
    /// Relative error in percent.
    pub fn re_percent(&self) -> f64 {
        100.0 * self.output.relative_error.expect("cells carry a reference")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub config: String,
    pub cells: Vec<Cell>,
    /// RE(CMC) / RE(CoV), for chance-constraint rows.
    pub ratio: Option<f64>,
}

impl TableRow {
    pub fn cell(&self, column: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.column == column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub id: String,
    pub title: String,
    pub rows: Vec<TableRow>,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    let cfg = SimConfig::new(spec.n, spec.seed);
    let rows = match (&spec.greeks, &spec.ccp) {
        (Some(g), _) => greek_rows(spec, g, &cfg)?,
        (_, Some(c)) => ccp_rows(c, &cfg)?,
        _ => unreachable!("validated"),
    };
    Ok(Report { id: spec.id.clone(), title: spec.title.clone(), rows })
}

pub fn greek_column(greek: Greek, method: Method) -> String {
    format!("{greek} {method}")
}

fn greek_rows(spec: &ExperimentSpec, study: &GreeksStudy, cfg: &SimConfig) -> Result<Vec<TableRow>> {
    let option = study.option.option();
    let mut rows = Vec::with_capacity(study.steps.len());
    for &m in &study.steps {
        let model = study.model.model(m)?;
        let truth = reference_values(spec, study, &model, &option)?;
        let estimates = study
            .methods
            .iter()
            .map(|&mn| {
                let method = Method::from(mn);
                Ok((method, estimate_greeks_on(&model, &option, method, cfg, &stream_label(&model, &option, method))?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut cells = Vec::new();
        for greek in Greek::ALL {
            let reference = truth.get(greek);
            if reference == 0.0 || !reference.is_finite() {
                return Err(HarnessError::DegenerateReference(format!("reference {greek} at m = {m} is {reference}")));
            }
            for (method, est) in &estimates {
                cells.push(Cell { column: greek_column(greek, *method), output: est.get(greek).with_reference(reference), reference });
            }
        }
        rows.push(TableRow { config: format!("m={m}"), cells, ratio: None });
    }
    Ok(rows)
}

/// True Greek values for one configuration, as declared by the spec's reference source.
pub fn reference_values(spec: &ExperimentSpec, study: &GreeksStudy, model: &Model, option: &OptionSpec) -> Result<GreekValues> {
    match &study.reference {
        ReferenceSpec::Analytic => analytic_reference(model, option),
        ReferenceSpec::LargeSample { n_ref, methods } => {
            let cfg = SimConfig::new(*n_ref, spec.seed);
            large_sample_reference(model, option, methods, &cfg)
        }
        ReferenceSpec::Tabulated { values, .. } => {
            let m = model.steps();
            let v = values.iter().find(|v| v.steps == m).ok_or_else(|| HarnessError::Spec(format!("no tabulated reference for m = {m}")))?;
            Ok(GreekValues { price: f64::NAN, delta: v.delta, vega: v.vega, theta: v.theta, gamma: v.gamma })
        }
    }
}

/// Registered analytic references: digital options under both models.
pub fn analytic_reference(model: &Model, option: &OptionSpec) -> Result<GreekValues> {
    match (model, option.kind) {
        (Model::Bs(p), OptionKind::Digital) => Ok(oracle::bs_digital(p, option.strike)),
        (Model::Vg(p), OptionKind::Digital) => Ok(oracle::vg_digital(p, option.strike)?),
        _ => Err(HarnessError::Spec(format!("no analytic reference for {} on the {} model", option.kind, model.name()))),
    }
}

/// Inverse-variance combination of independent large-sample estimates, on streams disjoint from the experiment's.
pub fn large_sample_reference(model: &Model, option: &OptionSpec, methods: &[MethodName], cfg: &SimConfig) -> Result<GreekValues> {
    let runs = methods
        .iter()
        .map(|&mn| {
            let method = Method::from(mn);
            let label = format!("reference/{}", stream_label(model, option, method));
            estimate_greeks_on(model, option, method, cfg, &label)
        })
        .collect::<covmc_core::Result<Vec<_>>>()?;
    let combine = |greek: Greek| {
        let (num, den) = runs.iter().map(|r| r.get(greek)).fold((0.0, 0.0), |(num, den), o| {
            let w = 1.0 / (o.se * o.se);
            (num + w * o.estimate, den + w)
        });
        num / den
    };
    Ok(GreekValues {
        price: f64::NAN,
        delta: combine(Greek::Delta),
        vega: combine(Greek::Vega),
        theta: combine(Greek::Theta),
        gamma: combine(Greek::Gamma),
    })
}

/// Large-sample references for every step count of a greeks study, ready to paste into a spec file.
pub fn tabulate_references(spec: &ExperimentSpec, n_ref: u64, methods: &[MethodName]) -> Result<Vec<TabulatedValues>> {
    let study = spec.greeks.as_ref().ok_or_else(|| HarnessError::Spec("reference tables apply to greeks experiments".into()))?;
    if methods.contains(&MethodName::Cov) {
        return Err(HarnessError::Spec("reference methods must not include CoV".into()));
    }
    let option = study.option.option();
    let cfg = SimConfig::new(n_ref, spec.seed);
    study
        .steps
        .iter()
        .map(|&m| {
            let model = study.model.model(m)?;
            let v = large_sample_reference(&model, &option, methods, &cfg)?;
            Ok(TabulatedValues { steps: m, delta: v.delta, vega: v.vega, theta: v.theta, gamma: v.gamma })
        })
        .collect()
}

fn ccp_rows(study: &CcpStudy, cfg: &SimConfig) -> Result<Vec<TableRow>> {
    let dist = study.distribution()?;
    let mut rows = Vec::new();
    for &m in &study.dims {
        for &p in &study.levels {
            let b = find_b_for_level(m, study.rho, p, dist);
            let inst = CcpInstance::equicorrelated(m, study.rho, b, dist)?;
            let reference = inst.exact_gradient()[0];
            let mut cells = Vec::new();
            for &mn in &study.methods {
                let output = match mn {
                    MethodName::Cmc => ccp_cmc(&inst, cfg)?,
                    MethodName::Cov => ccp_cov(&inst, cfg)?.components[0],
                    MethodName::Lr => unreachable!("validated"),
                };
                cells.push(Cell { column: Method::from(mn).to_string(), output: output.with_reference(reference), reference });
            }
            let ratio = match (cells.iter().find(|c| c.column == "CMC"), cells.iter().find(|c| c.column == "CoV")) {
                (Some(a), Some(b)) => Some(a.re_percent() / b.re_percent()),
                _ => None,
            };
            rows.push(TableRow { config: format!("m={m} p={p:.2}"), cells, ratio });
        }
    }
    Ok(rows)
}
