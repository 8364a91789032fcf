//! Adaptive Gauss-Kronrod (10/21 point) integration on finite and infinite ranges.

use crate::error::{CovError, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_067_703_704,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    pub max_depth: u32,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            relative: 1e-8,
            absolute: 1e-12,
            max_depth: 60,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn relative(relative: f64) -> Self {
        Self {
            relative,
            ..Self::default()
        }
    }
}

/// Converged integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kron.abs();
    let mut fv = [(0.0, 0.0); 10];
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv[j] = (f1, f2);
        kron += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[10] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kron * half;
    let abs_val = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut err = ((kron - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_val > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_val);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    (value, err)
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate_finite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(CovError::InvalidParameter(format!("finite bounds required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (value, error) = kronrod(&mut f, a, b);
    let mut segments = vec![Segment { a, b, value, error, depth: 0 }];
    let mut evaluations = 21;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        if total.is_finite() && total_err <= (tol.relative * total.abs()).max(tol.absolute) {
            return Ok(Integral { value: total, error: total_err, evaluations });
        }
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.depth < tol.max_depth)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let idx = match worst {
            Some(i) if segments.len() < tol.max_intervals => i,
            _ => {
                return Err(CovError::QuadratureFailed { lower: a, upper: b, estimate: total, error: total_err });
            }
        };
        let seg = segments.swap_remove(idx);
        let mid = 0.5 * (seg.a + seg.b);
        let (v1, e1) = kronrod(&mut f, seg.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, seg.b);
        evaluations += 42;
        segments.push(Segment { a: seg.a, b: mid, value: v1, error: e1, depth: seg.depth + 1 });
        segments.push(Segment { a: mid, b: seg.b, value: v2, error: e2, depth: seg.depth + 1 });
    }
}

/// Integrates `f` over `[a, inf)` using the map `t = a + s / (1 - s)`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(mut f: F, a: f64, tol: Tolerance) -> Result<Integral> {
    integrate_finite(
        |s| {
            let u = 1.0 - s;
            let v = f(a + s / u);
            if v == 0.0 { 0.0 } else { v / (u * u) }
        },
        0.0,
        1.0,
        tol,
    )
    .map_err(|e| relabel(e, a, f64::INFINITY))
}

fn integrate_lower_infinite<F: FnMut(f64) -> f64>(mut f: F, b: f64, tol: Tolerance) -> Result<Integral> {
    integrate_semi_infinite(|t| f(2.0 * b - t), b, tol).map_err(|e| relabel(e, f64::NEG_INFINITY, b))
}

fn relabel(e: CovError, lower: f64, upper: f64) -> CovError {
    match e {
        CovError::QuadratureFailed { estimate, error, .. } => CovError::QuadratureFailed { lower, upper, estimate, error },
        other => other,
    }
}

/// Integrates over any interval, finite or not. Reversed bounds flip the sign.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if a.is_nan() || b.is_nan() {
        return Err(CovError::InvalidParameter("NaN integration bound".into()));
    }
    if a > b {
        return integrate(f, b, a, tol).map(|r| Integral { value: -r.value, ..r });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_finite(f, a, b, tol),
        (true, false) => integrate_semi_infinite(f, a, tol),
        (false, true) => integrate_lower_infinite(f, b, tol),
        (false, false) => {
            let left = integrate_lower_infinite(&mut f, 0.0, tol)?;
            let right = integrate_semi_infinite(&mut f, 0.0, tol)?;
            Ok(Integral {
                value: left.value + right.value,
                error: left.error + right.error,
                evaluations: left.evaluations + right.evaluations,
            })
        }
    }
}
