//! Bracketed scalar root finding.

use crate::error::{CovError, Result};

/// Brent's method on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(CovError::RootNotFound);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(CovError::RootNotFound)
}

/// Finds the root of a monotone `f` inside `(lo, hi)`, expanding geometrically from the centre.
/// Returns `Ok(None)` when `f` keeps one sign across the slice.
pub fn root_in_slice<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> Result<Option<f64>> {
    if !(lo < hi) {
        return Err(CovError::InvalidParameter(format!("empty slice ({lo}, {hi})")));
    }
    let centre = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    };
    let fc = f(centre);
    if fc == 0.0 {
        return Ok(Some(centre));
    }
    let step = |bound: f64, dir: f64, k: i32| {
        if bound.is_finite() {
            bound + (centre - bound) * 2f64.powi(-k - 1)
        } else {
            centre + dir * 2f64.powi(k)
        }
    };
    let mut bracket = None;
    for k in 0..64 {
        let left = step(lo, -1.0, k);
        let fl = f(left);
        if fl.is_finite() && fl.signum() != fc.signum() {
            bracket = Some((left, centre));
            break;
        }
        let right = step(hi, 1.0, k);
        let fr = f(right);
        if fr.is_finite() && fr.signum() != fc.signum() {
            bracket = Some((centre, right));
            break;
        }
    }
    match bracket {
        None => Ok(None),
        Some((a, b)) => {
            let x = brent(&mut f, a, b, 1e-15 * a.abs().min(b.abs()).max(1e-300), 400)?;
            Ok(Some(x))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let r = root_in_slice(|x| x.exp() - 1e5, f64::NEG_INFINITY, f64::INFINITY).unwrap().unwrap();
        assert!((r - 1e5f64.ln()).abs() < 1e-12);
        let r = root_in_slice(|x| x.ln() + 30.0, 0.0, f64::INFINITY).unwrap().unwrap();
        assert!((r.ln() + 30.0).abs() < 1e-9);
        assert_eq!(root_in_slice(|x| x.exp(), f64::NEG_INFINITY, f64::INFINITY).unwrap(), None);
    }
}
