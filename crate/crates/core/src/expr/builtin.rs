//! Named non-expression functions: the Cantor-set turning data, the ±1 step,
//! and functions that vanish to infinite order at a point or on a set.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;

use super::taylor::Taylor;
use crate::error::{Error, Result};

/// Digits examined before a point is treated as lying on the Cantor set.
/// Points whose first `1` comes later form a set of measure `(2/3)^128`.
pub const CANTOR_MAX_DIGITS: u32 = 128;

/// Triadic depth at which the cumulative table for `cantor_H` is resolved.
pub const CANTOR_TABLE_DEPTH: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// `h` of the Cantor example: `(-1)^n` where `n` is the first triadic digit 1.
    CantorH,
    /// Running integral of [`Builtin::CantorH`] from 0.
    CantorHInt,
    /// `+1` for `x < 0`, `-1` for `x > 0`, `0` at the origin.
    StepPm1,
    /// `exp(-1/x^2)`, flat at the origin.
    FlatExp,
    /// `exp(-1/(r^2 - (x-c)^2))` on `|x - c| < r`, zero elsewhere.
    FlatBump { c: f64, r: f64 },
    /// Smooth, positive off the middle-thirds Cantor set `K ⊂ [0,1]` and flat on it:
    /// a scaled bump on every gap of `K`, `exp(-1/x^2)` left of 0 and
    /// `exp(-1/(x-1)^2)` right of 1.
    CantorBump,
}

impl Builtin {
    pub const NAMES: [&'static str; 6] = [
        "cantor_h",
        "cantor_H",
        "step_pm1",
        "flat_exp",
        "flat_bump",
        "cantor_bump",
    ];

    pub fn new(name: &str, params: &[f64]) -> Result<Builtin> {
        let expect = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::Arity {
                    name: name.to_string(),
                    expected: n,
                    got: params.len(),
                })
            }
        };
        match name {
            "cantor_h" => expect(0).map(|_| Builtin::CantorH),
            "cantor_H" => expect(0).map(|_| Builtin::CantorHInt),
            "step_pm1" => expect(0).map(|_| Builtin::StepPm1),
            "flat_exp" => expect(0).map(|_| Builtin::FlatExp),
            "cantor_bump" => expect(0).map(|_| Builtin::CantorBump),
            "flat_bump" => {
                expect(2)?;
                let (c, r) = (params[0], params[1]);
                if !(c.is_finite() && r.is_finite() && r > 0.0) {
                    return Err(Error::Domain(format!(
                        "flat_bump needs finite center and positive radius, got ({c}, {r})"
                    )));
                }
                Ok(Builtin::FlatBump { c, r })
            }
            _ => Err(Error::UnknownBuiltin(name.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::CantorH => "cantor_h",
            Builtin::CantorHInt => "cantor_H",
            Builtin::StepPm1 => "step_pm1",
            Builtin::FlatExp => "flat_exp",
            Builtin::FlatBump { .. } => "flat_bump",
            Builtin::CantorBump => "cantor_bump",
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.taylor(x, 0)?.value())
    }

    pub fn taylor(&self, x: f64, order: usize) -> Result<Taylor> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("{} at non-finite x", self.name())));
        }
        let unsupported = || Error::OrderUnsupported {
            name: self.name().to_string(),
            order,
            x,
        };
        match *self {
            Builtin::CantorH => match cantor_position(x) {
                CantorPos::Gap { n, .. } => Ok(Taylor::constant(sign_pow(n), order)),
                CantorPos::Outside => Ok(Taylor::constant(0.0, order)),
                CantorPos::InSet if order == 0 => Ok(Taylor::constant(0.0, 0)),
                CantorPos::InSet => Err(unsupported()),
            },
            Builtin::CantorHInt => {
                let value = cantor_big_h(x);
                if order == 0 {
                    return Ok(Taylor::constant(value, 0));
                }
                let slope = match cantor_position(x) {
                    CantorPos::Gap { n, .. } => sign_pow(n),
                    CantorPos::Outside => 0.0,
                    CantorPos::InSet => return Err(unsupported()),
                };
                let mut c = vec![0.0; order + 1];
                c[0] = value;
                c[1] = slope;
                Ok(Taylor::from_coefficients(&c))
            }
            Builtin::StepPm1 => {
                if x < 0.0 {
                    Ok(Taylor::constant(1.0, order))
                } else if x > 0.0 {
                    Ok(Taylor::constant(-1.0, order))
                } else if order == 0 {
                    Ok(Taylor::constant(0.0, 0))
                } else {
                    Err(unsupported())
                }
            }
            Builtin::FlatExp => flat_exp(Taylor::variable(x, order)),
            Builtin::FlatBump { c, r } => {
                let d = x - c;
                if d.abs() >= r {
                    return Ok(Taylor::constant(0.0, order));
                }
                let s = Taylor::variable(d, order);
                flat_of_denominator(s * s * -1.0 + r * r)
            }
            Builtin::CantorBump => {
                if x < 0.0 {
                    return flat_exp(Taylor::variable(x, order));
                }
                if x > 1.0 {
                    return flat_exp(Taylor::variable(x - 1.0, order));
                }
                match cantor_position(x) {
                    CantorPos::Gap { n, frac } => {
                        let len = 3f64.powi(-(n as i32));
                        // normalized position in (-1, 1) across the gap
                        let mut coeffs = vec![0.0; order + 1];
                        coeffs[0] = 2.0 * frac - 1.0;
                        if order >= 1 {
                            coeffs[1] = 2.0 / len;
                        }
                        let s = Taylor::from_coefficients(&coeffs);
                        let inner = flat_of_denominator(s * s * -1.0 + 1.0)?;
                        Ok(inner * (-1.0 / len).exp())
                    }
                    _ => Ok(Taylor::constant(0.0, order)),
                }
            }
        }
    }

    /// Points inside `[lo, hi]` where the function fails to be smooth.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let pts: Vec<f64> = match *self {
            Builtin::StepPm1 => vec![0.0],
            Builtin::FlatBump { c, r } => vec![c - r, c + r],
            Builtin::CantorH | Builtin::CantorHInt | Builtin::CantorBump => {
                cantor_endpoints(4)
            }
            Builtin::FlatExp => vec![],
        };
        pts.into_iter().filter(|p| *p > lo && *p < hi).collect()
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::FlatBump { c, r } => write!(f, "builtin:flat_bump({c},{r})"),
            other => write!(f, "builtin:{}()", other.name()),
        }
    }
}

fn sign_pow(n: u32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `exp(-1/s^2)` with the flat value at `s = 0`.
fn flat_exp(s: Taylor) -> Result<Taylor> {
    flat_of_denominator(s * s)
}

/// `exp(-1/q)` for `q > 0`; the zero jet when `q ≤ 0` or the value underflows.
fn flat_of_denominator(q: Taylor) -> Result<Taylor> {
    let q0 = q.value();
    if q0 <= 0.0 || (-1.0 / q0).exp() == 0.0 {
        return Ok(Taylor::constant(0.0, q.order()));
    }
    (-q.recip()?).exp()
}

/// Location of a point relative to the middle-thirds Cantor set `K ⊂ [0,1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CantorPos {
    Outside,
    InSet,
    /// Inside an open gap removed at level `n`; `frac ∈ (0,1)` is the relative
    /// position across the gap.
    Gap { n: u32, frac: f64 },
}

enum Remainder {
    Small { r: u128, shift: u32 },
    Big { r: BigUint, shift: u64 },
}

impl Remainder {
    fn new(t: f64) -> Remainder {
        // t in (0, 1): t = mantissa * 2^-shift exactly
        let bits = t.to_bits();
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac_bits = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exp_bits == 0 {
            (frac_bits, -1074i64)
        } else {
            (frac_bits | (1u64 << 52), exp_bits - 1075)
        };
        let tz = mantissa.trailing_zeros() as i64;
        let mantissa = mantissa >> tz;
        let shift = (-(exp + tz)) as u64;
        if shift <= 124 {
            Remainder::Small {
                r: mantissa as u128,
                shift: shift as u32,
            }
        } else {
            Remainder::Big {
                r: BigUint::from(mantissa),
                shift,
            }
        }
    }

    /// Multiplies by 3 and splits off the next triadic digit.
    fn next_digit(&mut self) -> u8 {
        match self {
            Remainder::Small { r, shift } => {
                *r *= 3;
                let d = (*r >> *shift) as u8;
                *r &= (1u128 << *shift) - 1;
                d
            }
            Remainder::Big { r, shift } => {
                *r *= 3u32;
                let d = (&*r >> *shift).to_u32_digits().first().copied().unwrap_or(0) as u8;
                let mask = (BigUint::from(1u8) << *shift) - 1u8;
                *r &= mask;
                d
            }
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Remainder::Small { r, .. } => *r == 0,
            Remainder::Big { r, .. } => r.bits() == 0,
        }
    }

    fn fraction(&self) -> f64 {
        match self {
            Remainder::Small { r, shift } => *r as f64 / 2f64.powi(*shift as i32),
            Remainder::Big { r, shift } => {
                let keep = 60u64;
                let drop = shift.saturating_sub(keep);
                let top = (r >> drop).to_u64_digits().first().copied().unwrap_or(0);
                top as f64 / 2f64.powi((*shift - drop) as i32)
            }
        }
    }
}

/// Classifies `t` by exact triadic digit extraction of its binary value.
/// Expansions are greedy, so a triadic rational takes its terminating form.
pub fn cantor_position(t: f64) -> CantorPos {
    if !(0.0..=1.0).contains(&t) {
        return CantorPos::Outside;
    }
    if t == 0.0 || t == 1.0 {
        return CantorPos::InSet;
    }
    let mut rem = Remainder::new(t);
    for n in 1..=CANTOR_MAX_DIGITS {
        let d = rem.next_digit();
        if d == 1 {
            if rem.is_zero() {
                // left endpoint of a gap
                return CantorPos::InSet;
            }
            return CantorPos::Gap {
                n,
                frac: rem.fraction(),
            };
        }
        if rem.is_zero() {
            return CantorPos::InSet;
        }
    }
    CantorPos::InSet
}

/// Distance from `t` to the middle-thirds Cantor set.
pub fn cantor_distance(t: f64) -> f64 {
    if t < 0.0 {
        return -t;
    }
    if t > 1.0 {
        return t - 1.0;
    }
    match cantor_position(t) {
        CantorPos::Gap { n, frac } => frac.min(1.0 - frac) * 3f64.powi(-(n as i32)),
        _ => 0.0,
    }
}

/// Endpoints of the gaps removed at levels `1..=depth`, plus 0 and 1, sorted.
pub fn cantor_endpoints(depth: u32) -> Vec<f64> {
    let mut kept = vec![(0.0f64, 1.0f64)];
    let mut pts = vec![0.0, 1.0];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(kept.len() * 2);
        for (a, b) in kept {
            let l = (b - a) / 3.0;
            pts.push(a + l);
            pts.push(b - l);
            next.push((a, a + l));
            next.push((b - l, b));
        }
        kept = next;
    }
    pts.sort_by(f64::total_cmp);
    pts
}

pub fn cantor_h(t: f64) -> f64 {
    match cantor_position(t) {
        CantorPos::Gap { n, .. } => sign_pow(n),
        _ => 0.0,
    }
}

/// Cumulative integral of `cantor_h` at the cell boundaries `k / 3^12`.
///
/// A cell whose triadic index contains a 1 lies in a gap and `h` is constant
/// there. A surviving cell is a scaled copy of `[0, 1]` on which `h` picks up
/// the factor `(-1)^12`, so its integral is `cantor_H(1) * width = -width / 5`.
fn cantor_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let depth = CANTOR_TABLE_DEPTH;
        let cells = 3usize.pow(depth);
        let width = 1.0 / cells as f64;
        let mut cum = Vec::with_capacity(cells + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for k in 0..cells {
            let mut first_one = None;
            let mut rest = k;
            for pos in (1..=depth).rev() {
                if rest % 3 == 1 {
                    first_one = Some(pos);
                }
                rest /= 3;
            }
            acc += match first_one {
                Some(n) => sign_pow(n) * width,
                None => sign_pow(depth) * -0.2 * width,
            };
            cum.push(acc);
        }
        cum
    })
}

/// `∫_0^t cantor_h`, piecewise linear between the depth-12 triadic grid points.
pub fn cantor_big_h(t: f64) -> f64 {
    let table = cantor_table();
    let cells = table.len() - 1;
    let t = t.clamp(0.0, 1.0);
    if t >= 1.0 {
        return table[cells];
    }
    let pos = t * cells as f64;
    let k = (pos.floor() as usize).min(cells - 1);
    let w = pos - k as f64;
    table[k] + w * (table[k + 1] - table[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent digit loop on exact rationals p/q.
    fn first_one_rational(mut p: u64, q: u64, max: u32) -> Option<u32> {
        for n in 1..=max {
            p *= 3;
            let d = p / q;
            p %= q;
            if d == 1 {
                return Some(n);
            }
        }
        None
    }

    #[test]
    fn cantor_h_examples() {
        assert_eq!(first_one_rational(1, 2, 60), Some(1));
        assert_eq!(cantor_h(0.5), -1.0);
        assert_eq!(first_one_rational(1, 4, 60), None);
        assert_eq!(cantor_h(0.25), 0.0);
        assert_eq!(cantor_position(0.25), CantorPos::InSet);
        assert_eq!(cantor_h(-0.3), 0.0);
        assert_eq!(cantor_h(1.7), 0.0);
    }

    #[test]
    fn cantor_h_takes_three_values() {
        for i in 0..5000 {
            let t = -0.2 + 1.4 * i as f64 / 4999.0;
            let v = cantor_h(t);
            assert!(v == -1.0 || v == 0.0 || v == 1.0);
        }
    }

    #[test]
    fn gap_fraction_locates_point() {
        // 0.4 lies in the first gap (1/3, 2/3)
        match cantor_position(0.4) {
            CantorPos::Gap { n, frac } => {
                assert_eq!(n, 1);
                assert!((frac - (0.4 * 3.0 - 1.0)).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!((cantor_distance(0.4) - (0.4 - 1.0 / 3.0)).abs() < 1e-15);
        assert!((cantor_distance(0.6) - (2.0 / 3.0 - 0.6)).abs() < 1e-15);
        assert_eq!(cantor_distance(-0.5), 0.5);
    }

    #[test]
    fn tiny_arguments_use_bigint_path() {
        let t = 1e-40;
        // 3^-84 < 1e-40 < 3^-83, so the first nonzero digit sits at n = 84
        match cantor_position(t) {
            CantorPos::Gap { n, .. } => assert!(n >= 84),
            CantorPos::InSet => {}
            CantorPos::Outside => panic!("inside [0,1]"),
        }
        assert!(cantor_distance(t) <= t);
    }

    #[test]
    fn step_and_order_errors() {
        let s = Builtin::StepPm1;
        assert_eq!(s.eval(-2.0).unwrap(), 1.0);
        assert_eq!(s.eval(3.0).unwrap(), -1.0);
        assert_eq!(s.eval(0.0).unwrap(), 0.0);
        assert!(matches!(s.taylor(0.0, 1), Err(Error::OrderUnsupported { .. })));
        assert_eq!(s.taylor(0.5, 3).unwrap().derivatives(), vec![-1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn arity_and_unknown() {
        assert!(matches!(Builtin::new("flat_bump", &[0.0]), Err(Error::Arity { .. })));
        assert!(matches!(Builtin::new("cantor_h", &[1.0]), Err(Error::Arity { .. })));
        assert!(matches!(Builtin::new("nope", &[]), Err(Error::UnknownBuiltin(_))));
        assert!(Builtin::new("flat_bump", &[0.0, -1.0]).is_err());
    }

    #[test]
    fn flat_exp_first_derivative() {
        // d/dx exp(-1/x^2) = 2/x^3 exp(-1/x^2); at 1/2: 16 e^-4
        let d = Builtin::FlatExp.taylor(0.5, 1).unwrap().derivatives();
        let e4 = (-4.0f64).exp();
        assert!((d[0] - e4).abs() < 1e-16);
        assert!((d[1] - 16.0 * e4).abs() < 1e-15);
        // finite-difference oracle
        let step = 1e-6;
        let fd = ((-1.0 / (0.5f64 + step).powi(2)).exp() - (-1.0 / (0.5f64 - step).powi(2)).exp())
            / (2.0 * step);
        assert!((d[1] - fd).abs() < 1e-9);
        assert_eq!(Builtin::FlatExp.taylor(0.0, 4).unwrap().derivatives(), vec![0.0; 5]);
    }

    #[test]
    fn flat_functions_vanish_monotonically() {
        let bump = Builtin::FlatBump { c: 0.0, r: 1.0 };
        for (f, x_star, dir) in [
            (Builtin::FlatExp, 0.0, 1.0),
            (Builtin::FlatExp, 0.0, -1.0),
            (bump, 1.0, -1.0),
            (bump, -1.0, 1.0),
        ] {
            let mut prev = vec![f64::INFINITY; 5];
            let mut last = vec![0.0; 5];
            for n in 2..=12 {
                let x = x_star + dir * 2f64.powi(-n);
                let d = f.taylor(x, 4).unwrap().derivatives();
                for k in 0..5 {
                    // higher derivatives of the bump still oscillate at distance 1/16
                    if n >= 6 {
                        assert!(d[k].abs() <= prev[k], "order {k} at {x}");
                    }
                    prev[k] = d[k].abs();
                    last[k] = d[k].abs();
                }
            }
            assert!(last.iter().all(|v| *v < 1e-12));
        }
    }

    #[test]
    fn cantor_bump_is_flat_on_the_set_and_positive_off_it() {
        let f = Builtin::CantorBump;
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
        assert_eq!(f.eval(0.25).unwrap(), 0.0);
        assert_eq!(f.eval(1.0).unwrap(), 0.0);
        assert!(f.eval(0.5).unwrap() > 0.0);
        assert!(f.eval(-0.5).unwrap() > 0.0);
        assert!(f.eval(1.5).unwrap() > 0.0);
        // peak of the first gap: e^-3 * e^-1
        assert!((f.eval(0.5).unwrap() - (-4.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn cantor_big_h_matches_series() {
        // sum over n of (-1)^n 2^(n-1) / 3^n
        let series: f64 = (1..200)
            .map(|n| sign_pow(n) * 2f64.powi(n as i32 - 1) / 3f64.powi(n as i32))
            .sum();
        assert!((series + 0.2).abs() < 1e-15);
        let v = cantor_big_h(1.0);
        assert!((v - series).abs() < 1e-12, "cantor_H(1) = {v}");
        // the first kept third is a sign-flipped copy scaled by 1/3
        let third: f64 = 0.2 / 3.0;
        assert!((cantor_big_h(1.0 / 3.0) - third).abs() < 1e-12);
    }
}
