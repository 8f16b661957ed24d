//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Default recursion limit; deep enough for kinks and jumps without looping forever.
pub const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` (or the negated integral over `[b, a]`) to an
/// absolute tolerance `tol`.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    adaptive_simpson_depth(f, a, b, tol, MAX_DEPTH)
}

pub fn adaptive_simpson_depth<F>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite bounds [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return Ok(-adaptive_simpson_depth(f, b, a, tol, max_depth)?);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let v = recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature("non-finite integral".into()))
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || m <= a || m >= b {
        return Ok(left + right + delta / 15.0);
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Adaptive open Newton-Cotes (Milne) rule: never samples the interval
/// endpoints, so integrands that jump exactly at a breakpoint are handled
/// without special-casing the breakpoint value.
pub fn adaptive_open<F>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite bounds [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return Ok(-adaptive_open(f, b, a, tol, max_depth)?);
    }
    let l = b - a;
    let f1 = f(a + 0.25 * l)?;
    let f2 = f(a + 0.5 * l)?;
    let f3 = f(a + 0.75 * l)?;
    let v = open_recurse(f, a, b, [f1, f2, f3], tol, max_depth)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature("non-finite integral".into()))
    }
}

fn milne(l: f64, n: [f64; 3]) -> f64 {
    l / 3.0 * (2.0 * n[0] - n[1] + 2.0 * n[2])
}

fn open_recurse<F>(f: &F, a: f64, b: f64, n: [f64; 3], tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let l = b - a;
    let m = a + 0.5 * l;
    let left_nodes = [f(a + 0.125 * l)?, n[0], f(a + 0.375 * l)?];
    let right_nodes = [f(a + 0.625 * l)?, n[2], f(a + 0.875 * l)?];
    let whole = milne(l, n);
    let left = milne(0.5 * l, left_nodes);
    let right = milne(0.5 * l, right_nodes);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || m <= a || m >= b {
        return Ok(left + right + delta / 15.0);
    }
    Ok(open_recurse(f, a, m, left_nodes, 0.5 * tol, depth - 1)?
        + open_recurse(f, m, b, right_nodes, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_abs_sin() {
        let v = adaptive_simpson(&|x: f64| Ok(x.sin().abs()), 0.0, std::f64::consts::PI, 1e-12)
            .unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_bounds_negate() {
        let f = |x: f64| Ok(x * x);
        let a = adaptive_simpson(&f, 0.0, 1.0, 1e-12).unwrap();
        let b = adaptive_simpson(&f, 1.0, 0.0, 1e-12).unwrap();
        assert!((a - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(a, -b);
    }

    #[test]
    fn open_rule_ignores_endpoint_values() {
        // jumps exactly at both endpoints; the interior is constant
        let f = |x: f64| Ok(if x <= 0.0 || x >= 1.0 { 100.0 } else { -1.0 });
        let v = adaptive_open(&f, 0.0, 1.0, 1e-12, 20).unwrap();
        assert_eq!(v, -1.0);
        let g = |x: f64| Ok(x.powi(3) - x);
        let w = adaptive_open(&g, -1.0, 2.0, 1e-12, 20).unwrap();
        assert!((w - (15.0 / 4.0 - 1.5)).abs() < 1e-12);
    }

    #[test]
    fn kink_is_resolved() {
        let v = adaptive_simpson(&|x: f64| Ok(-x.abs()), -1.0, 0.7, 1e-12).unwrap();
        assert!((v - (-0.5 - 0.245)).abs() < 1e-10);
    }
}
