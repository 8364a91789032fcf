use covmc_core::ccp::*;
use covmc_core::quadrature::{integrate, Tolerance};
use covmc_core::special::norm_pdf;
use covmc_core::SimConfig;
use nalgebra::DMatrix;

const T4: CcpDistribution = CcpDistribution::StudentT { dof: 4.0 };

fn instance(m: usize, level: f64, dist: CcpDistribution) -> CcpInstance {
    CcpInstance::equicorrelated(m, 0.3, find_b_for_level(m, 0.3, level, dist), dist).unwrap()
}

#[test]
fn level_search_values() {
    let b = find_b_for_level(5, 0.3, 0.95, CcpDistribution::Normal);
    assert!((b - 11f64.sqrt() * 1.644_853_626_951_472).abs() < 1e-8);
    assert!(find_b_for_level(5, 0.3, 0.5, CcpDistribution::Normal).abs() < 1e-12);
    let bt = find_b_for_level(5, 0.3, 0.95, T4);
    assert!((bt - 11f64.sqrt() * 2.131_846_786).abs() < 1e-6);
    for dist in [CcpDistribution::Normal, T4] {
        let p = ccp_probability(&instance(5, 0.95, dist), &SimConfig::new(100_000, 2)).unwrap();
        assert!(p.z_score(0.95) < 4.0);
    }
}

#[test]
fn cov_gradient_matches_closed_form() {
    for dist in [CcpDistribution::Normal, T4] {
        for m in [5, 10] {
            let inst = instance(m, 0.95, dist);
            let exact = inst.exact_gradient();
            let g = ccp_cov(&inst, &SimConfig::new(50_000, 3)).unwrap();
            assert_eq!(g.components.len(), m);
            for (est, e) in g.components.iter().zip(&exact) {
                assert!(est.z_score(*e) < 4.0, "{dist:?} m={m}: {} vs {e}", est.estimate);
            }
            let cmc = ccp_cmc(&inst, &SimConfig::new(50_000, 3)).unwrap();
            assert!(cmc.z_score(exact[0]) < 4.0);
        }
    }
}

#[test]
fn heavy_dof_matches_normal() {
    let cfg = SimConfig::new(100_000, 4);
    let n = ccp_cov(&instance(5, 0.95, CcpDistribution::Normal), &cfg).unwrap().components[0];
    let b = find_b_for_level(5, 0.3, 0.95, CcpDistribution::Normal);
    let inst = CcpInstance::equicorrelated(5, 0.3, b, CcpDistribution::StudentT { dof: 1e6 }).unwrap();
    let t = ccp_cov(&inst, &cfg).unwrap().components[0];
    assert!((n.estimate - t.estimate).abs() < 4.0 * (n.se * n.se + t.se * t.se).sqrt());
}

#[test]
fn scaling_weights_and_level_scales_gradient_inversely() {
    for dist in [CcpDistribution::Normal, T4] {
        let inst = instance(5, 0.9, dist);
        let cfg = SimConfig::new(2000, 5);
        let base = ccp_cov(&inst, &cfg).unwrap();
        for c in [0.25, 3.0, 17.0] {
            let scaled = ccp_cov(&inst.scaled(c).unwrap(), &cfg).unwrap();
            for (a, b) in base.components.iter().zip(&scaled.components) {
                assert!((c * b.estimate - a.estimate).abs() <= 1e-10 * a.estimate.abs());
            }
        }
    }
}

#[test]
fn finite_difference_of_probability_brackets_gradient() {
    let inst = instance(5, 0.9, CcpDistribution::Normal);
    let h = 1e-2;
    let cfg = SimConfig::new(400_000, 6);
    let shifted = |d: f64| {
        let mut w = inst.weights.clone();
        w[0] += d;
        CcpInstance::new(inst.cov.clone(), w, inst.level, inst.dist).unwrap()
    };
    let up = ccp_probability(&shifted(h), &cfg).unwrap();
    let down = ccp_probability(&shifted(-h), &cfg).unwrap();
    let fd = (up.estimate - down.estimate) / (2.0 * h);
    // Common random numbers: the difference only sees paths that switch sides.
    let fd_se = (up.se * up.se + down.se * down.se).sqrt() / (2.0 * h);
    let g = ccp_cov(&inst, &SimConfig::new(100_000, 7)).unwrap().components[0];
    assert!((fd - g.estimate).abs() < 4.0 * (fd_se * fd_se + g.se * g.se).sqrt(), "{fd} vs {}", g.estimate);
}

#[test]
fn exchangeable_components_agree() {
    let g = ccp_cov(&instance(10, 0.95, T4), &SimConfig::new(50_000, 8)).unwrap();
    let first = g.components[0];
    for c in &g.components[1..] {
        assert!((c.estimate - first.estimate).abs() < 4.0 * (c.se * c.se + first.se * first.se).sqrt());
    }
}

#[test]
fn two_dimensional_conditional_formula_integrates_to_gradient() {
    let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]);
    let inst = CcpInstance::new(cov, vec![1.0, 0.7], 1.1, CcpDistribution::Normal).unwrap();
    let kernel = CmcKernel::new(&inst).unwrap();
    let sd_w = 0.7;
    let total = integrate(|w| kernel.conditional(w, 1.1) * norm_pdf(w / sd_w) / sd_w, f64::NEG_INFINITY, f64::INFINITY, Tolerance::relative(1e-10))
        .unwrap()
        .value;
    assert!((total - inst.exact_gradient()[0]).abs() < 1e-4 * total.abs());
}

#[test]
fn cmc_needs_two_dimensions() {
    let inst = CcpInstance::equicorrelated(1, 0.0, 1.0, CcpDistribution::Normal).unwrap();
    assert!(ccp_cmc(&inst, &SimConfig::new(100, 1)).is_err());
}
