//! The metric
//!
//! ```text
//! g = (cosh u - h(x) sinh u)² dx² + (du - f(x) v dx)² + (dv + f(x) u dx)²
//! ```
//!
//! with its adapted orthonormal frame `(e1, e2, T)`, the scalars `a`, `β` and
//! the splitting tensor.

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::expr::{cantor_distance, cantor_endpoints, cantor_position, CantorPos, ScalarFunction, Taylor};
use crate::quad;

/// `|cosh u - h sinh u|` below this is treated as a degenerate metric.
pub const DEGENERATE_FACTOR: f64 = 1e-13;

/// Tolerance for the running integral `A(x) = ∫_0^x f`.
pub const A_TOL: f64 = 1e-10;

/// Triadic depth of the gap endpoints standing in for the Cantor set when a
/// finite list of non-smooth points is needed.
pub const CANTOR_LADDER_DEPTH: u32 = 4;

/// Points where `h` (and possibly the chart) fails to be smooth.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum NonsmoothSet {
    #[default]
    Empty,
    Points(Vec<f64>),
    /// The middle-thirds Cantor set in `[0, 1]`.
    Cantor,
}

impl NonsmoothSet {
    pub fn is_empty(&self) -> bool {
        match self {
            NonsmoothSet::Empty => true,
            NonsmoothSet::Points(p) => p.is_empty(),
            NonsmoothSet::Cantor => false,
        }
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: f64) -> f64 {
        match self {
            NonsmoothSet::Empty => f64::INFINITY,
            NonsmoothSet::Points(p) => p.iter().map(|q| (x - q).abs()).fold(f64::INFINITY, f64::min),
            NonsmoothSet::Cantor => cantor_distance(x),
        }
    }

    /// Finite list of representative non-smooth points.
    pub fn representatives(&self) -> Vec<f64> {
        match self {
            NonsmoothSet::Empty => vec![],
            NonsmoothSet::Points(p) => p.clone(),
            NonsmoothSet::Cantor => cantor_endpoints(CANTOR_LADDER_DEPTH),
        }
    }

    /// Whether the open segment between `x_star` and `x` avoids the set, so
    /// that `x` lies on a smooth side adjacent to `x_star`.
    pub fn clear_between(&self, x_star: f64, x: f64) -> bool {
        let (lo, hi) = if x < x_star { (x, x_star) } else { (x_star, x) };
        match self {
            NonsmoothSet::Empty => true,
            NonsmoothSet::Points(p) => !p.iter().any(|q| *q > lo && *q < hi),
            NonsmoothSet::Cantor => {
                if hi <= 0.0 || lo >= 1.0 {
                    return true;
                }
                match cantor_position(x) {
                    CantorPos::Gap { n, frac } => {
                        let len = 3f64.powi(-(n as i32));
                        let (a, b) = (x - frac * len, x + (1.0 - frac) * len);
                        let slack = 1e-12 * len.max(1e-300);
                        x_star >= a - slack && x_star <= b + slack
                    }
                    CantorPos::Outside => {
                        if x < 0.0 {
                            x_star <= 0.0
                        } else {
                            x_star >= 1.0
                        }
                    }
                    CantorPos::InSet => false,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub f: ScalarFunction,
    pub h: ScalarFunction,
    /// `None` is the whole real line.
    pub domain: Option<(f64, f64)>,
    pub nonsmooth: NonsmoothSet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub x: f64,
    pub u: f64,
    pub v: f64,
}

impl ChartPoint {
    pub fn new(x: f64, u: f64, v: f64) -> Self {
        ChartPoint { x, u, v }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.u, self.v]
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        ChartPoint::new(c[0], c[1], c[2])
    }
}

/// Adapted orthonormal frame in `(x, u, v)` coordinate components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub t: Vector3<f64>,
    pub a: f64,
    pub beta: f64,
}

/// Splitting tensor in the basis `(e1, e2)` of `T^⊥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingTensorMat(pub Matrix2<f64>);

impl SplittingTensorMat {
    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn determinant(&self) -> f64 {
        // exact for the strictly upper triangular form
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }
}

impl MetricSpec {
    pub fn new(f: ScalarFunction, h: ScalarFunction) -> Self {
        MetricSpec {
            f,
            h,
            domain: None,
            nonsmooth: NonsmoothSet::Empty,
        }
    }

    pub fn parse(f: &str, h: &str) -> Result<Self> {
        Ok(MetricSpec::new(ScalarFunction::parse(f)?, ScalarFunction::parse(h)?))
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    pub fn with_nonsmooth(mut self, set: NonsmoothSet) -> Self {
        self.nonsmooth = set;
        self
    }

    pub fn check_x(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("x = {x} is not finite")));
        }
        if let Some((lo, hi)) = self.domain {
            if x < lo || x > hi {
                return Err(Error::Domain(format!("x = {x} outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// `cosh u - h(x) sinh u`, the length of the `dx` direction orthogonal to
    /// the leaf.
    pub fn factor(&self, p: &ChartPoint) -> Result<f64> {
        self.check_x(p.x)?;
        let h = self.h.eval(p.x)?;
        let factor = p.u.cosh() - h * p.u.sinh();
        if factor.abs() < DEGENERATE_FACTOR || !factor.is_finite() {
            return Err(Error::DegenerateMetric {
                x: p.x,
                u: p.u,
                factor,
            });
        }
        Ok(factor)
    }

    /// `A(x) = ∫_0^x f`, by adaptive Simpson split at the breakpoints of `f`.
    pub fn rotation_angle(&self, x: f64) -> Result<f64> {
        let (lo, hi) = if x < 0.0 { (x, 0.0) } else { (0.0, x) };
        let mut cuts = vec![lo];
        cuts.extend(self.f.breakpoints(lo, hi));
        cuts.push(hi);
        let f = |t: f64| self.f.eval(t);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            total += quad::adaptive_simpson(&f, w[0], w[1], A_TOL)?;
        }
        Ok(if x < 0.0 { -total } else { total })
    }

    /// `1/a = (cosh u - h sinh u)/f` as a truncated Taylor series in `u`.
    pub fn inv_a_series(&self, p: &ChartPoint, order: usize) -> Result<Taylor> {
        let f = self.f.eval(p.x)?;
        if f == 0.0 {
            return Err(Error::Domain(format!("a vanishes at x = {}", p.x)));
        }
        Ok(self.factor_series(p, order)? * (1.0 / f))
    }

    /// `β = (h cosh u - sinh u)/(cosh u - h sinh u)` as a series in `u`.
    pub fn beta_series(&self, p: &ChartPoint, order: usize) -> Result<Taylor> {
        let h = self.h.eval(p.x)?;
        let (s, c) = Taylor::variable(p.u, order).sinh_cosh()?;
        let num = c * h - s;
        num / self.factor_series(p, order)?
    }

    /// `a = f/(cosh u - h sinh u)` as a series in `u`.
    pub fn a_series(&self, p: &ChartPoint, order: usize) -> Result<Taylor> {
        let f = self.f.eval(p.x)?;
        Ok(self.factor_series(p, order)?.recip()? * f)
    }

    fn factor_series(&self, p: &ChartPoint, order: usize) -> Result<Taylor> {
        self.factor(p)?;
        let h = self.h.eval(p.x)?;
        let (s, c) = Taylor::variable(p.u, order).sinh_cosh()?;
        Ok(c - s * h)
    }
}

/// Metric components in the `(x, u, v)` basis.
pub fn metric_at(spec: &MetricSpec, p: &ChartPoint) -> Result<Matrix3<f64>> {
    let factor = spec.factor(p)?;
    let f = spec.f.eval(p.x)?;
    let (u, v) = (p.u, p.v);
    Ok(Matrix3::new(
        factor * factor + f * f * (u * u + v * v),
        -f * v,
        f * u,
        -f * v,
        1.0,
        0.0,
        f * u,
        0.0,
        1.0,
    ))
}

pub fn frame_at(spec: &MetricSpec, p: &ChartPoint) -> Result<Frame> {
    let factor = spec.factor(p)?;
    let f = spec.f.eval(p.x)?;
    let h = spec.h.eval(p.x)?;
    let (s, c) = (p.u.sinh(), p.u.cosh());
    Ok(Frame {
        e1: Vector3::new(0.0, 1.0, 0.0),
        e2: Vector3::new(1.0, p.v * f, -p.u * f) / factor,
        t: Vector3::new(0.0, 0.0, 1.0),
        a: f / factor,
        beta: (h * c - s) / factor,
    })
}

/// `C = [[0, a], [0, 0]]`: `C(e1) = 0`, `C(e2) = a e1`.
pub fn splitting_tensor(spec: &MetricSpec, p: &ChartPoint) -> Result<SplittingTensorMat> {
    let fr = frame_at(spec, p)?;
    Ok(SplittingTensorMat(Matrix2::new(0.0, fr.a, 0.0, 0.0)))
}

/// Rotated coordinates `(x, u cos A - v sin A, u sin A + v cos A)` with
/// `A = ∫_0^x f`, and the factor `cosh u - h sinh u`.
pub fn sekigawa_change(spec: &MetricSpec, p: &ChartPoint) -> Result<([f64; 3], f64)> {
    let pval = spec.factor(p)?;
    let a = spec.rotation_angle(p.x)?;
    let (s, c) = a.sin_cos();
    Ok(([p.x, p.u * c - p.v * s, p.u * s + p.v * c], pval))
}
