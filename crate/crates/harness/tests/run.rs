use std::time::Instant;

use covmc_harness::spec::ReferenceSpec;
use covmc_harness::{emit, run_experiment, ExperimentSpec, Format, HarnessError, Report};

fn smoke() -> ExperimentSpec {
    ExperimentSpec::load("smoke").unwrap()
}

#[test]
fn smoke_preset_is_fast_and_well_formed() {
    let start = Instant::now();
    let report = run_experiment(&smoke()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(report.rows.len(), 1);
    let row = &report.rows[0];
    assert_eq!(row.config, "m=10");
    assert_eq!(row.cells.len(), 12);
    assert!(row.cells.iter().all(|c| c.re_percent() >= 0.0 && c.output.n == 100));
}

#[test]
fn one_row_gives_two_csv_lines() {
    let text = emit(&run_experiment(&smoke()).unwrap(), Format::Csv);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
}

#[test]
fn markdown_keeps_column_count() {
    let report = run_experiment(&smoke()).unwrap();
    let text = emit(&report, Format::Markdown);
    let rows: Vec<_> = text.lines().filter(|l| l.starts_with('|')).collect();
    assert_eq!(rows.len(), 3);
    let cols = |l: &str| l.matches('|').count() - 1;
    assert!(rows.iter().all(|r| cols(r) == 13));
}

#[test]
fn relative_errors_round_to_one_decimal() {
    let mut report: Report = run_experiment(&smoke()).unwrap();
    let cell = &mut report.rows[0].cells[0];
    cell.output.relative_error = Some(0.00444);
    let text = emit(&report, Format::Csv);
    assert!(text.lines().nth(1).unwrap().split(',').nth(1) == Some("0.4"));
}

#[test]
fn ccp_rows_carry_ratio() {
    let mut spec = ExperimentSpec::load("table7").unwrap();
    spec.n = 2000;
    spec.ccp.as_mut().unwrap().dims = vec![5];
    let report = run_experiment(&spec).unwrap();
    assert_eq!(report.rows.len(), 3);
    for row in &report.rows {
        let ratio = row.cell("CMC").unwrap().re_percent() / row.cell("CoV").unwrap().re_percent();
        assert!((row.ratio.unwrap() - ratio).abs() < 1e-12);
    }
}

#[test]
fn output_is_reproducible_for_a_fixed_seed() {
    let a = emit(&run_experiment(&smoke()).unwrap(), Format::Csv);
    let b = emit(&run_experiment(&smoke()).unwrap(), Format::Csv);
    assert_eq!(a, b);
    let mut other = smoke();
    other.seed += 1;
    assert_ne!(a, emit(&run_experiment(&other).unwrap(), Format::Csv));
}

#[test]
fn missing_references_are_errors() {
    let mut spec = ExperimentSpec::load("table2").unwrap();
    spec.greeks.as_mut().unwrap().reference = ReferenceSpec::Analytic;
    assert!(matches!(run_experiment(&spec), Err(HarnessError::Spec(_))));
    spec.greeks.as_mut().unwrap().reference = ReferenceSpec::Tabulated { generated_by: String::new(), values: vec![] };
    assert!(matches!(run_experiment(&spec), Err(HarnessError::Spec(_))));
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = smoke();
    spec.n = 99;
    assert!(spec.validate().is_err());
    let mut spec = smoke();
    spec.greeks.as_mut().unwrap().reference = ReferenceSpec::LargeSample { n_ref: 500, methods: vec![covmc_harness::spec::MethodName::Lr] };
    assert!(spec.validate().is_err());
    spec.greeks.as_mut().unwrap().reference = ReferenceSpec::LargeSample { n_ref: 5000, methods: vec![covmc_harness::spec::MethodName::Cov] };
    assert!(spec.validate().is_err());
    assert!(ExperimentSpec::parse("id = \"x\"\nn = 1000\nseed = 1\n").is_err());
    assert!(ExperimentSpec::parse(&smoke().to_toml().replace("seed = 1", "seed = 1\nbogus = 2")).is_err());
}

#[test]
fn cmc_on_a_barrier_is_a_spec_error() {
    let mut spec = ExperimentSpec::load("table3").unwrap();
    spec.n = 1000;
    spec.greeks.as_mut().unwrap().steps = vec![10];
    spec.greeks.as_mut().unwrap().methods.push(covmc_harness::spec::MethodName::Cmc);
    let err = run_experiment(&spec).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}
