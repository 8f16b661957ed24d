//! Curves in the hyperbolic plane with prescribed turning angle and the
//! foliation by geodesics orthogonal to them.
//!
//! A curve is integrated as the pair (point, parallel unit field `Y`); its
//! tangent at time `t` is `Y` rotated by `H(t)`. The leaf through `γ(s)` is
//! the geodesic in direction `X = γ'(s)` rotated by `+π/2`, so that the
//! Jacobi field of neighbouring leaves is `(cosh u - h sinh u) X`.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::ScalarFunction;
use crate::hyperbolic::{dist, HGeodesic, HPoint, HTangent};

pub const DEFAULT_STEP: f64 = 1e-4;

/// Tolerance on discrete slopes of `H` before a curve is declared
/// non-foliating.
pub const LIPSCHITZ_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub point: HPoint,
    pub tangent: HTangent,
    pub frame: HTangent,
    /// `H(t)`.
    pub angle: f64,
}

#[derive(Debug, Clone)]
pub struct TurningCurve {
    pub turning: ScalarFunction,
    pub samples: Vec<CurveSample>,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leaf {
    pub s: f64,
    pub geodesic: HGeodesic,
}

impl Leaf {
    pub fn at(&self, u: f64) -> HPoint {
        self.geodesic.at(u)
    }

    /// `n` equally spaced points with parameters in `[-span, span]`.
    pub fn points(&self, span: f64, n: usize) -> Vec<HPoint> {
        let n = n.max(2);
        (0..n)
            .map(|k| self.at(-span + 2.0 * span * k as f64 / (n - 1) as f64))
            .collect()
    }
}

type State = [f64; 4];

fn rhs(s: &State, angle: f64) -> State {
    let [_, y, yx, yy] = *s;
    let (sn, cs) = angle.sin_cos();
    let vx = cs * yx - sn * yy;
    let vy = sn * yx + cs * yy;
    // parallel transport: Y' = -Γ(γ', Y)
    [vx, vy, (vx * yy + vy * yx) / y, (vy * yy - vx * yx) / y]
}

fn rk4(s: &State, h: f64, angles: [f64; 3]) -> State {
    let add = |a: &State, k: &State, c: f64| -> State { std::array::from_fn(|i| a[i] + c * k[i]) };
    let k1 = rhs(s, angles[0]);
    let k2 = rhs(&add(s, &k1, 0.5 * h), angles[1]);
    let k3 = rhs(&add(s, &k2, 0.5 * h), angles[1]);
    let k4 = rhs(&add(s, &k3, h), angles[2]);
    std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn sample_from(t: f64, s: &State, angle: f64) -> Result<CurveSample> {
    let point = HPoint::new(s[0], s[1])?;
    let frame = HTangent::new(point, s[2], s[3]);
    Ok(CurveSample {
        t,
        point,
        tangent: frame.rotated(angle),
        frame,
        angle,
    })
}

/// Integrates one direction from the anchor, returning samples after it.
fn integrate_leg(
    turning: &ScalarFunction,
    start: State,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<Vec<CurveSample>> {
    let n = ((t1 - t0).abs() / step).ceil() as usize;
    if n == 0 {
        return Ok(vec![]);
    }
    let h = (t1 - t0) / n as f64;
    let mut grid: Vec<f64> = (0..=2 * n).map(|k| t0 + 0.5 * h * k as f64).collect();
    grid[2 * n] = t1;
    let reversed = h < 0.0;
    if reversed {
        grid.reverse();
    }
    let mut angles = turning.eval_grid(&grid)?;
    if reversed {
        angles.reverse();
        grid.reverse();
    }
    let mut out = Vec::with_capacity(n);
    let mut s = start;
    for k in 0..n {
        s = rk4(&s, h, [angles[2 * k], angles[2 * k + 1], angles[2 * k + 2]]);
        if !(s[1] > 0.0 && s.iter().all(|v| v.is_finite())) {
            return Err(Error::Domain(format!(
                "curve left the half-plane at t = {}",
                grid[2 * k + 2]
            )));
        }
        out.push(sample_from(grid[2 * k + 2], &s, angles[2 * k + 2])?);
    }
    Ok(out)
}

/// Fixed-step RK4 integration of the turning-angle curve with `γ'(t0) = v0`
/// at the anchor `t0`, the point of `t_span` closest to 0.
pub fn integrate_turning_curve(
    turning: &ScalarFunction,
    p0: HPoint,
    v0: HTangent,
    t_span: (f64, f64),
    step: f64,
) -> Result<TurningCurve> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::StepSize(step));
    }
    let (lo, hi) = t_span;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Domain(format!("bad parameter span [{lo}, {hi}]")));
    }
    let anchor = 0f64.clamp(lo, hi);
    let a0 = turning.eval(anchor)?;
    let v0 = HTangent { base: p0, ..v0 }.normalized();
    let y0 = v0.rotated(-a0);
    let start = [p0.x, p0.y, y0.dx, y0.dy];
    let mut back = integrate_leg(turning, start, anchor, lo, step)?;
    back.reverse();
    let fwd = integrate_leg(turning, start, anchor, hi, step)?;
    let mut samples = back;
    samples.push(sample_from(anchor, &start, a0)?);
    samples.extend(fwd);
    Ok(TurningCurve {
        turning: turning.clone(),
        samples,
        step,
    })
}

impl TurningCurve {
    pub fn span(&self) -> (f64, f64) {
        (self.samples[0].t, self.samples[self.samples.len() - 1].t)
    }

    fn segment(&self, s: f64) -> Result<usize> {
        let (lo, hi) = self.span();
        if !(s >= lo && s <= hi) {
            return Err(Error::OutOfSpan { s, lo, hi });
        }
        let k = self.samples.partition_point(|smp| smp.t <= s);
        Ok(k.clamp(1, self.samples.len() - 1) - 1)
    }

    /// State at parameter `s`: cubic Hermite position, linearly interpolated
    /// and renormalized tangent and frame.
    pub fn state_at(&self, s: f64) -> Result<CurveSample> {
        if self.samples.len() == 1 {
            let (lo, hi) = self.span();
            return if s == lo {
                Ok(self.samples[0])
            } else {
                Err(Error::OutOfSpan { s, lo, hi })
            };
        }
        let k = self.segment(s)?;
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        if s == a.t {
            return Ok(*a);
        }
        if s == b.t {
            return Ok(*b);
        }
        let dt = b.t - a.t;
        let w = (s - a.t) / dt;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * w) * (1.0 - w).powi(2),
            w * (1.0 - w).powi(2),
            w * w * (3.0 - 2.0 * w),
            w * w * (w - 1.0),
        );
        let x = h00 * a.point.x + h10 * dt * a.tangent.dx + h01 * b.point.x + h11 * dt * b.tangent.dx;
        let y = h00 * a.point.y + h10 * dt * a.tangent.dy + h01 * b.point.y + h11 * dt * b.tangent.dy;
        let point = HPoint::new(x, y)?;
        let lerp = |p: &HTangent, q: &HTangent| {
            HTangent::new(point, p.dx + w * (q.dx - p.dx), p.dy + w * (q.dy - p.dy)).normalized()
        };
        Ok(CurveSample {
            t: s,
            point,
            tangent: lerp(&a.tangent, &b.tangent),
            frame: lerp(&a.frame, &b.frame),
            angle: a.angle + w * (b.angle - a.angle),
        })
    }

    /// Largest discrete slope `|ΔH / Δt|` and where it occurs.
    pub fn max_turning_slope(&self) -> (f64, f64) {
        let mut best = (0.0, self.samples[0].t);
        for w in self.samples.windows(2) {
            let slope = ((w[1].angle - w[0].angle) / (w[1].t - w[0].t)).abs();
            if slope > best.0 {
                best = (slope, w[0].t);
            }
        }
        best
    }

    /// Rows `t,x,y,tx,ty` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,tx,ty\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.t, s.point.x, s.point.y, s.tangent.dx, s.tangent.dy
            );
        }
        out
    }
}

/// The geodesic orthogonal to the curve at `γ(s)`.
pub fn leaf(curve: &TurningCurve, s: f64) -> Result<Leaf> {
    let st = curve.state_at(s)?;
    Ok(Leaf {
        s,
        geodesic: HGeodesic::new(st.point, st.tangent.rotated(FRAC_PI_2)),
    })
}

/// Distance to the first zero of the orthogonal Jacobi field
/// `cosh u - h sinh u`, which exists only for `|h| > 1`.
pub fn focal_distance(h_val: f64) -> Option<f64> {
    if h_val.abs() <= 1.0 {
        None
    } else {
        Some((1.0 / h_val.abs()).atanh())
    }
}

/// `L(t) = cosh d(p, γ(t))` and its derivative along the interpolated curve.
fn cosh_dist_and_slope(curve: &TurningCurve, p: HPoint, t: f64) -> Result<(f64, f64)> {
    let st = curve.state_at(t)?;
    let q = st.point;
    let (dx, dy) = (q.x - p.x, q.y - p.y);
    let sq = dx * dx + dy * dy;
    let l = 1.0 + sq / (2.0 * p.y * q.y);
    let qv = st.tangent;
    let dl = (2.0 * (dx * qv.dx + dy * qv.dy) * q.y - sq * qv.dy) / (2.0 * p.y * q.y * q.y);
    Ok((l, dl))
}

/// Foot parameter `s` of the leaf through `p` and the signed leaf distance `u`
/// from `γ(s)` to `p`.
pub fn nearest_leaf(curve: &TurningCurve, p: HPoint) -> Result<(f64, f64)> {
    let (slope, at) = curve.max_turning_slope();
    if slope > 1.0 + LIPSCHITZ_SLACK {
        return Err(Error::NonFoliating { t: at, slope });
    }
    let samples = &curve.samples;
    let n = samples.len();
    if n < 3 {
        return Err(Error::NotInSpan(samples[0].t));
    }
    let cosh_d = |q: HPoint| 1.0 + ((q.x - p.x).powi(2) + (q.y - p.y).powi(2)) / (2.0 * p.y * q.y);
    let k = (0..n)
        .min_by(|&i, &j| cosh_d(samples[i].point).total_cmp(&cosh_d(samples[j].point)))
        .unwrap_or(0);
    let (lo_t, hi_t) = curve.span();
    if k == 0 || k == n - 1 {
        return Err(Error::NotInSpan(samples[k].t));
    }
    let (mut a, mut b) = (samples[k - 1].t, samples[k + 1].t);
    // golden section on L
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = cosh_dist_and_slope(curve, p, c)?.0;
    let mut fd = cosh_dist_and_slope(curve, p, d)?.0;
    for _ in 0..30 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = cosh_dist_and_slope(curve, p, c)?.0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = cosh_dist_and_slope(curve, p, d)?.0;
        }
    }
    // widen to a sign-change bracket of dL/dt, then bisect
    let mut lo = (a - curve.step).max(lo_t);
    let mut hi = (b + curve.step).min(hi_t);
    let mut s = 0.5 * (a + b);
    let (dlo, dhi) = (
        cosh_dist_and_slope(curve, p, lo)?.1,
        cosh_dist_and_slope(curve, p, hi)?.1,
    );
    if dlo < 0.0 && dhi > 0.0 {
        for _ in 0..200 {
            s = 0.5 * (lo + hi);
            let ds = cosh_dist_and_slope(curve, p, s)?.1;
            if ds.abs() < 1e-10 || hi - lo <= 4.0 * f64::EPSILON * s.abs().max(1.0) {
                break;
            }
            if ds < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
        }
    }
    if s <= lo_t || s >= hi_t {
        return Err(Error::NotInSpan(s));
    }
    let lf = leaf(curve, s)?;
    let (_, u) = lf.geodesic.project(p);
    Ok((s, u))
}

/// Sampled minimum distance between two leaf segments with parameters in
/// `[-span, span]`: a grid over the first segment, refined by golden section,
/// against the exact distance to the second segment.
pub fn leaf_min_distance(a: &Leaf, b: &Leaf, span: f64, samples: usize) -> f64 {
    let to_b = |t: f64| {
        let q = a.at(t);
        let (d, foot) = b.geodesic.project(q);
        if foot.abs() <= span {
            d.abs()
        } else {
            dist(q, b.at(span.copysign(foot)))
        }
    };
    let n = samples.max(3);
    let h = 2.0 * span / (n - 1) as f64;
    let (mut best_t, mut best) = (-span, f64::INFINITY);
    for k in 0..n {
        let t = -span + h * k as f64;
        let v = to_b(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = ((best_t - h).max(-span), (best_t + h).min(span));
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = hi - inv_phi * (hi - lo);
        let d = lo + inv_phi * (hi - lo);
        if to_b(c) < to_b(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    best.min(to_b(0.5 * (lo + hi)))
}

/// Crossing parameters of two leaves when they meet inside the window.
pub fn leaves_cross(a: &Leaf, b: &Leaf, span: f64) -> Option<(f64, f64)> {
    a.geodesic
        .crossing(&b.geodesic)
        .filter(|(s, t)| s.abs() <= span && t.abs() <= span)
}

/// Equally spaced leaves over the curve's span.
pub fn leaf_family(curve: &TurningCurve, count: usize) -> Result<Vec<Leaf>> {
    let (lo, hi) = curve.span();
    if count == 1 {
        return Ok(vec![leaf(curve, 0.5 * (lo + hi))?]);
    }
    (0..count)
        .map(|k| leaf(curve, lo + (hi - lo) * k as f64 / (count - 1) as f64))
        .collect()
}
