use std::fmt;
use std::str::FromStr;

use super::builtin::Builtin;
use super::parse::Expression;
use super::taylor::{Taylor, MAX_ORDER};
use crate::error::{Error, Result};
use crate::quad;

/// Derivatives `(g(x), g'(x), ..., g^(k)(x))` of a scalar function at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub x: f64,
    pub values: Vec<f64>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.values[0]
    }

    pub fn derivative(&self, k: usize) -> f64 {
        self.values[k]
    }
}

/// A real function of one variable: a parsed expression, a named builtin,
/// or the running integral `t ↦ ∫_0^t g` of another function.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFunction {
    Expr(Expression),
    Builtin(Builtin),
    Integral(Box<ScalarFunction>),
}

/// Absolute tolerance for running integrals of generic functions.
const INTEGRAL_TOL: f64 = 1e-11;

impl ScalarFunction {
    pub fn zero() -> Self {
        ScalarFunction::Expr(Expression::Num(0.0))
    }

    pub fn constant(v: f64) -> Self {
        ScalarFunction::Expr(Expression::Num(v))
    }

    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        Ok(ScalarFunction::Builtin(Builtin::new(name, params)?))
    }

    /// Parses either an expression in `x` or `builtin:name(arg, ...)`.
    pub fn parse(src: &str) -> Result<Self> {
        let trimmed = src.trim();
        if let Some(rest) = trimmed.strip_prefix("builtin:") {
            return parse_builtin(rest, src.len() - trimmed.len() + "builtin:".len());
        }
        Ok(ScalarFunction::Expr(Expression::parse(src)?))
    }

    /// `t ↦ ∫_0^t self`. The Cantor turning data has a dedicated tabulated
    /// antiderivative.
    pub fn antiderivative(&self) -> ScalarFunction {
        match self {
            ScalarFunction::Builtin(Builtin::CantorH) => {
                ScalarFunction::Builtin(Builtin::CantorHInt)
            }
            other => ScalarFunction::Integral(Box::new(other.clone())),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            ScalarFunction::Expr(e) => e.eval(x),
            ScalarFunction::Builtin(b) => b.eval(x),
            ScalarFunction::Integral(inner) => integrate_from_zero(inner, x),
        }
    }

    /// Truncated Taylor expansion at `x`.
    pub fn taylor(&self, x: f64, order: usize) -> Result<Taylor> {
        if order > MAX_ORDER {
            return Err(Error::OrderUnsupported {
                name: self.to_string(),
                order,
                x,
            });
        }
        match self {
            ScalarFunction::Expr(e) => e.eval_taylor(&Taylor::variable(x, order)),
            ScalarFunction::Builtin(b) => b.taylor(x, order),
            ScalarFunction::Integral(inner) => {
                let value = integrate_from_zero(inner, x)?;
                if order == 0 {
                    return Ok(Taylor::constant(value, 0));
                }
                // (∫g)^(k) = g^(k-1)
                let d = inner.taylor(x, order - 1)?.coefficients().to_vec();
                let mut c = vec![value];
                for (k, v) in d.iter().enumerate() {
                    c.push(v / (k + 1) as f64);
                }
                Ok(Taylor::from_coefficients(&c))
            }
        }
    }

    /// Values on an ascending grid. Running integrals are accumulated
    /// cell by cell instead of being recomputed from 0.
    pub fn eval_grid(&self, grid: &[f64]) -> Result<Vec<f64>> {
        let ScalarFunction::Integral(inner) = self else {
            return grid.iter().map(|&t| self.eval(t)).collect();
        };
        let Some(&first) = grid.first() else {
            return Ok(vec![]);
        };
        let mut out = Vec::with_capacity(grid.len());
        let mut acc = integrate_from_zero(inner, first)?;
        out.push(acc);
        for w in grid.windows(2) {
            acc += integrate_between(inner, w[0], w[1])?;
            out.push(acc);
        }
        Ok(out)
    }

    pub fn eval_jet(&self, x: f64, order: usize) -> Result<Jet> {
        let t = self.taylor(x, order)?;
        Ok(Jet {
            x,
            values: t.derivatives(),
        })
    }

    /// Non-smooth points inside `(lo, hi)`.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            ScalarFunction::Expr(_) => vec![],
            ScalarFunction::Builtin(b) => b.breakpoints(lo, hi),
            ScalarFunction::Integral(inner) => inner.breakpoints(lo, hi),
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, ScalarFunction::Expr(e) if e.is_zero_literal())
    }
}

fn integrate_from_zero(inner: &ScalarFunction, x: f64) -> Result<f64> {
    integrate_between(inner, 0.0, x)
}

fn integrate_between(inner: &ScalarFunction, a: f64, b: f64) -> Result<f64> {
    let (lo, hi) = if b < a { (b, a) } else { (a, b) };
    let mut cuts = vec![lo];
    cuts.extend(inner.breakpoints(lo, hi));
    cuts.push(hi);
    let g = |t: f64| inner.eval(t);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += quad::adaptive_open(&g, w[0], w[1], INTEGRAL_TOL, 40)?;
    }
    Ok(if b < a { -total } else { total })
}

fn parse_builtin(rest: &str, base: usize) -> Result<ScalarFunction> {
    let syntax = |offset: usize, message: &str| Error::Syntax {
        offset: base + offset,
        message: message.to_string(),
    };
    let rest_trim = rest.trim_end();
    let (name, params) = match rest_trim.find('(') {
        None => (rest_trim.trim(), Vec::new()),
        Some(open) => {
            if !rest_trim.ends_with(')') {
                return Err(syntax(rest_trim.len(), "expected `)`"));
            }
            let inner = &rest_trim[open + 1..rest_trim.len() - 1];
            let mut params = Vec::new();
            if !inner.trim().is_empty() {
                let mut offset = open + 1;
                for piece in inner.split(',') {
                    let v = Expression::parse(piece)
                        .and_then(|e| e.eval(0.0))
                        .map_err(|_| syntax(offset, "builtin arguments must be constants"))?;
                    params.push(v);
                    offset += piece.len() + 1;
                }
            }
            (rest_trim[..open].trim(), params)
        }
    };
    ScalarFunction::builtin(name, &params)
}

impl FromStr for ScalarFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScalarFunction::parse(s)
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFunction::Expr(e) => write!(f, "{e}"),
            ScalarFunction::Builtin(b) => write!(f, "{b}"),
            ScalarFunction::Integral(inner) => write!(f, "integral({inner})"),
        }
    }
}
