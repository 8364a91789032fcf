use covmc_core::models::*;
use covmc_core::quadrature::{integrate, Tolerance};
use covmc_core::rng::StreamFamily;
use covmc_core::{engine, SimConfig};

fn vg(m: usize) -> VgParams {
    VgParams { spot: 100.0, rate: 0.05, sigma: 0.2, theta: -0.2, beta: 10.0, maturity: 1.0, steps: m }
}

#[test]
fn vg_terminal_mean_matches_law() {
    let model = VgModel::new(vg(10)).unwrap();
    let est = engine::estimate(&SimConfig::new(200_000, 3), "vg-mean", |rng| model.simulate(rng).0[9]).unwrap();
    assert!(est.z_score(model.expected_terminal()) < 4.0);
    let gsum = engine::estimate(&SimConfig::new(50_000, 4), "vg-clock", |rng| model.simulate(rng).1.iter().sum()).unwrap();
    assert!(gsum.z_score(1.0) < 4.0);
}

#[test]
fn bs_discounted_price_is_martingale() {
    let p = BsParams { spot: 100.0, rate: 0.05, sigma: 0.3, maturity: 1.0, steps: 10 };
    let model = BsModel::new(p).unwrap();
    let est = engine::estimate(&SimConfig::new(200_000, 5), "bs-mean", |rng| (-0.05f64).exp() * model.simulate(rng)[9]).unwrap();
    assert!(est.z_score(100.0) < 4.0);
}

#[test]
fn two_step_joint_density_integrates_to_one() {
    let p = BsParams { spot: 100.0, rate: 0.05, sigma: 0.3, maturity: 1.0, steps: 2 };
    let model = BsModel::new(p).unwrap();
    let tol = Tolerance::relative(1e-10);
    let total = integrate(
        |x1| {
            let f1 = model.transition_density(x1, 100.0);
            if f1 == 0.0 {
                return 0.0;
            }
            f1 * integrate(|x2| model.transition_density(x2, x1), 0.0, f64::INFINITY, tol).unwrap().value
        },
        0.0,
        f64::INFINITY,
        Tolerance::relative(1e-8),
    )
    .unwrap()
    .value;
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}

fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] { i += 1 } else { j += 1 }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn near_deterministic_clock_looks_like_black_scholes() {
    // Large beta shrinks the variance of the gamma clock; log returns become normal with sigma^2 T.
    let v = VgModel::new(VgParams { spot: 1.0, rate: 0.0, sigma: 0.2, theta: 0.0, beta: 45.0, maturity: 1.0, steps: 10 }).unwrap();
    let b = BsModel::new(BsParams { spot: 1.0, rate: 0.0, sigma: 0.2, maturity: 1.0, steps: 10 }).unwrap();
    let n = 2000;
    let fv = StreamFamily::new(1, "ks-vg");
    let fb = StreamFamily::new(1, "ks-bs");
    let mut a: Vec<f64> = (0..n).map(|i| v.simulate(&mut fv.path(i)).0[9].ln() - v.mu_beta).collect();
    let mut c: Vec<f64> = (0..n).map(|i| b.simulate(&mut fb.path(i))[9].ln() - b.mu).collect();
    let d = ks_statistic(&mut a, &mut c);
    // Two-sample critical value at the 1% level.
    let crit = 1.628 * (2.0 / n as f64).sqrt();
    assert!(d < crit, "KS distance {d} >= {crit}");
}
