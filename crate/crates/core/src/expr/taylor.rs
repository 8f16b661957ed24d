//! Truncated Taylor-polynomial arithmetic.
//!
//! A [`Taylor`] carries the normalized coefficients `c_k = g^(k)(x0) / k!` of a
//! function around a base point, truncated at a fixed order. Every operation
//! propagates the coefficients exactly (up to rounding) through the usual
//! convolution recurrences, so derivatives come out without any differencing.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Highest supported derivative order.
pub const MAX_ORDER: usize = 4;

const LEN: usize = MAX_ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Taylor {
    c: [f64; LEN],
    order: usize,
}

impl Taylor {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = [0.0; LEN];
        c[0] = value;
        Self {
            c,
            order: order.min(MAX_ORDER),
        }
    }

    /// The identity function `t ↦ t` expanded around `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut t = Self::constant(x0, order);
        if t.order >= 1 {
            t.c[1] = 1.0;
        }
        t
    }

    pub fn from_coefficients(coeffs: &[f64]) -> Self {
        assert!(!coeffs.is_empty() && coeffs.len() <= LEN);
        let mut c = [0.0; LEN];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Self {
            c,
            order: coeffs.len() - 1,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c[..=self.order]
    }

    /// Derivatives `(g, g', g'', ...)` up to the carried order.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                self.c[k] * fact
            })
            .collect()
    }

    /// `k`-th derivative (0 if `k` exceeds the carried order).
    pub fn derivative(&self, k: usize) -> f64 {
        if k > self.order {
            return 0.0;
        }
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.c[k] * fact
    }

    /// True when every coefficient above the constant term is zero.
    pub fn is_constant(&self) -> bool {
        self.c[1..=self.order].iter().all(|&v| v == 0.0)
    }

    fn zip(&self, other: &Self) -> usize {
        self.order.min(other.order)
    }

    fn map_const(&self, value: f64) -> Self {
        Self::constant(value, self.order)
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        for v in out.c.iter_mut() {
            *v *= k;
        }
        out
    }

    pub fn recip(&self) -> Result<Self> {
        self.map_const(1.0).checked_div(self)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        let n = self.zip(rhs);
        let b0 = rhs.c[0];
        if b0 == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let mut q = Self::constant(0.0, n);
        for k in 0..=n {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= rhs.c[j] * q.c[k - j];
            }
            q.c[k] = acc / b0;
        }
        q.finite()
    }

    pub fn exp(&self) -> Result<Self> {
        let mut e = self.map_const(self.c[0].exp());
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e.c[k - j];
            }
            e.c[k] = acc / k as f64;
        }
        e.finite()
    }

    pub fn ln(&self) -> Result<Self> {
        let a0 = self.c[0];
        if a0 <= 0.0 {
            return Err(Error::Domain(format!("ln of non-positive value {a0}")));
        }
        let mut l = self.map_const(a0.ln());
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l.c[j] * self.c[k - j];
            }
            l.c[k] = (self.c[k] - acc / k as f64) / a0;
        }
        l.finite()
    }

    pub fn sqrt(&self) -> Result<Self> {
        let a0 = self.c[0];
        if a0 < 0.0 {
            return Err(Error::Domain(format!("sqrt of negative value {a0}")));
        }
        if a0 == 0.0 {
            if self.order == 0 {
                return Ok(self.map_const(0.0));
            }
            return Err(Error::Domain("sqrt is not differentiable at 0".into()));
        }
        let r0 = a0.sqrt();
        let mut r = self.map_const(r0);
        for k in 1..=self.order {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= r.c[j] * r.c[k - j];
            }
            r.c[k] = acc / (2.0 * r0);
        }
        r.finite()
    }

    /// Simultaneous expansion of `(sin, cos)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let (s0, c0) = self.c[0].sin_cos();
        let mut s = self.map_const(s0);
        let mut c = self.map_const(c0);
        for k in 1..=self.order {
            let (mut sa, mut ca) = (0.0, 0.0);
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                sa += w * c.c[k - j];
                ca += w * s.c[k - j];
            }
            s.c[k] = sa / k as f64;
            c.c[k] = -ca / k as f64;
        }
        (s, c)
    }

    /// Simultaneous expansion of `(sinh, cosh)`.
    pub fn sinh_cosh(&self) -> Result<(Self, Self)> {
        let a0 = self.c[0];
        let mut s = self.map_const(a0.sinh());
        let mut c = self.map_const(a0.cosh());
        for k in 1..=self.order {
            let (mut sa, mut ca) = (0.0, 0.0);
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                sa += w * c.c[k - j];
                ca += w * s.c[k - j];
            }
            s.c[k] = sa / k as f64;
            c.c[k] = ca / k as f64;
        }
        Ok((s.finite()?, c.finite()?))
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    // t' = a' (1 + sign * t^2), solved coefficient by coefficient.
    fn tan_like(&self, t0: f64, sign: f64) -> Self {
        let mut t = self.map_const(t0);
        let mut w = self.map_const(1.0 + sign * t0 * t0);
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * w.c[k - j];
            }
            t.c[k] = acc / k as f64;
            let mut sq = 0.0;
            for j in 0..=k {
                sq += t.c[j] * t.c[k - j];
            }
            w.c[k] = sign * sq;
        }
        t
    }

    pub fn tan(&self) -> Result<Self> {
        if self.c[0].cos() == 0.0 {
            return Err(Error::Domain("tan at a pole".into()));
        }
        self.tan_like(self.c[0].tan(), 1.0).finite()
    }

    pub fn tanh(&self) -> Self {
        self.tan_like(self.c[0].tanh(), -1.0)
    }

    pub fn abs(&self) -> Result<Self> {
        let a0 = self.c[0];
        if a0 > 0.0 {
            Ok(*self)
        } else if a0 < 0.0 {
            Ok(-*self)
        } else if self.order == 0 || self.is_constant() {
            Ok(self.map_const(0.0))
        } else {
            Err(Error::Domain("abs is not differentiable at 0".into()))
        }
    }

    /// `self^n` for an integer exponent, by repeated squaring.
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut base = *self;
        let mut acc = self.map_const(1.0);
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc.finite()
    }

    /// `self^r` for a real constant exponent.
    pub fn powf(&self, r: f64) -> Result<Self> {
        let a0 = self.c[0];
        if a0 < 0.0 {
            return Err(Error::Domain(format!(
                "non-integer power {r} of negative value {a0}"
            )));
        }
        if a0 == 0.0 {
            if self.order == 0 || self.is_constant() {
                if r < 0.0 {
                    return Err(Error::Domain("zero raised to a negative power".into()));
                }
                return Ok(self.map_const(if r == 0.0 { 1.0 } else { 0.0 }));
            }
            return Err(Error::Domain(format!("power {r} is not differentiable at 0")));
        }
        let mut p = self.map_const(a0.powf(r));
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((r + 1.0) * j as f64 - k as f64) * self.c[j] * p.c[k - j];
            }
            p.c[k] = acc / (k as f64 * a0);
        }
        p.finite()
    }

    /// General power `self^rhs`.
    pub fn pow(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_constant() {
            let r = rhs.c[0];
            if r.fract() == 0.0 && r.abs() <= 1024.0 {
                return self.powi(r as i64);
            }
            return self.powf(r);
        }
        if self.c[0] <= 0.0 {
            return Err(Error::Domain(
                "variable exponent requires a positive base".into(),
            ));
        }
        (self.ln()? * *rhs).exp()
    }

    fn finite(self) -> Result<Self> {
        if self.c[..=self.order].iter().all(|v| v.is_finite()) {
            Ok(self)
        } else {
            Err(Error::Domain("non-finite result".into()))
        }
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        let n = self.zip(&rhs);
        let mut out = Taylor::constant(0.0, n);
        for k in 0..=n {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        self + (-rhs)
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        let n = self.zip(&rhs);
        let mut out = Taylor::constant(0.0, n);
        for k in 0..=n {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.c[j] * rhs.c[k - j];
            }
            out.c[k] = acc;
        }
        out
    }
}

impl Div for Taylor {
    type Output = Result<Taylor>;
    fn div(self, rhs: Taylor) -> Result<Taylor> {
        self.checked_div(&rhs)
    }
}

impl Add<f64> for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: f64) -> Taylor {
        self.c[0] += rhs;
        self
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: f64) -> Taylor {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn exp_at_zero_is_all_ones() {
        let d = Taylor::variable(0.0, 4).exp().unwrap().derivatives();
        assert_eq!(d, vec![1.0; 5]);
    }

    #[test]
    fn sin_cos_derivatives_cycle() {
        let x = Taylor::variable(0.7, 4);
        let s = x.sin().derivatives();
        let (sv, cv) = 0.7f64.sin_cos();
        let expect = [sv, cv, -sv, -cv, sv];
        for (a, b) in s.iter().zip(expect) {
            assert!(close(*a, b, 1e-14));
        }
    }

    #[test]
    fn tanh_matches_closed_form_derivatives() {
        let x0 = 0.3f64;
        let t = x0.tanh();
        let d = Taylor::variable(x0, 3).tanh().derivatives();
        let s2 = 1.0 - t * t;
        assert!(close(d[1], s2, 1e-14));
        assert!(close(d[2], -2.0 * t * s2, 1e-14));
        assert!(close(d[3], -2.0 * s2 * s2 + 4.0 * t * t * s2, 1e-13));
    }

    #[test]
    fn ln_and_sqrt_reject_bad_domain() {
        assert!(Taylor::variable(-1.0, 2).ln().is_err());
        assert!(Taylor::variable(0.0, 2).ln().is_err());
        assert!(Taylor::variable(-1.0, 1).sqrt().is_err());
        assert!(Taylor::variable(0.0, 1).sqrt().is_err());
        assert_eq!(Taylor::constant(0.0, 0).sqrt().unwrap().value(), 0.0);
    }

    #[test]
    fn powf_of_variable() {
        // d^k/dx^k x^2.5 at x = 2
        let d = Taylor::variable(2.0, 3).powf(2.5).unwrap().derivatives();
        assert!(close(d[0], 2f64.powf(2.5), 1e-14));
        assert!(close(d[1], 2.5 * 2f64.powf(1.5), 1e-14));
        assert!(close(d[2], 2.5 * 1.5 * 2f64.powf(0.5), 1e-14));
        assert!(close(d[3], 2.5 * 1.5 * 0.5 * 2f64.powf(-0.5), 1e-14));
    }

    #[test]
    fn division_and_reciprocal() {
        let x = Taylor::variable(1.0, 3);
        let r = x.recip().unwrap().derivatives();
        assert!(close(r[0], 1.0, 1e-15));
        assert!(close(r[1], -1.0, 1e-15));
        assert!(close(r[2], 2.0, 1e-15));
        assert!(close(r[3], -6.0, 1e-15));
        assert!(x.checked_div(&Taylor::constant(0.0, 3)).is_err());
    }
}
