//! Upper half-plane model of the hyperbolic plane.
//!
//! Geodesics are evaluated in closed form: a unit tangent at `p` is the image
//! of the upward unit vector at `i` under `z ↦ x0 + y0 R_α(z)`, where `R_α` is
//! the elliptic Möbius map fixing `i` and rotating by `α`. The geodesic through
//! `i` pointing up is `t ↦ i e^t`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this normalized horizontal component a geodesic is treated as vertical.
pub const VERTICAL_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && y > 0.0 {
            Ok(HPoint { x, y })
        } else {
            Err(Error::Domain(format!("({x}, {y}) is not in the upper half-plane")))
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    fn from_complex(z: Complex64) -> Self {
        HPoint { x: z.re, y: z.im }
    }
}

/// Tangent vector in coordinate components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HTangent {
    pub base: HPoint,
    pub dx: f64,
    pub dy: f64,
}

impl HTangent {
    pub fn new(base: HPoint, dx: f64, dy: f64) -> Self {
        HTangent { base, dx, dy }
    }

    /// Unit vector at `base` making Euclidean angle `theta` with `∂x`.
    pub fn from_angle(base: HPoint, theta: f64) -> Self {
        HTangent {
            base,
            dx: base.y * theta.cos(),
            dy: base.y * theta.sin(),
        }
    }

    pub fn unit_x(base: HPoint) -> Self {
        HTangent::from_angle(base, 0.0)
    }

    pub fn unit_y(base: HPoint) -> Self {
        HTangent::from_angle(base, std::f64::consts::FRAC_PI_2)
    }

    pub fn norm(&self) -> f64 {
        self.dx.hypot(self.dy) / self.base.y
    }

    pub fn inner(&self, other: &HTangent) -> f64 {
        (self.dx * other.dx + self.dy * other.dy) / (self.base.y * self.base.y)
    }

    /// Euclidean angle with `∂x`; the metric is conformal so this is also the
    /// hyperbolic angle.
    pub fn angle(&self) -> f64 {
        self.dy.atan2(self.dx)
    }

    pub fn normalized(&self) -> HTangent {
        self.scaled(1.0 / self.norm())
    }

    pub fn scaled(&self, k: f64) -> HTangent {
        HTangent {
            base: self.base,
            dx: k * self.dx,
            dy: k * self.dy,
        }
    }

    /// Rotation by `angle` counterclockwise.
    pub fn rotated(&self, angle: f64) -> HTangent {
        let (s, c) = angle.sin_cos();
        HTangent {
            base: self.base,
            dx: c * self.dx - s * self.dy,
            dy: s * self.dx + c * self.dy,
        }
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.dx, self.dy)
    }
}

/// Arc-length parametrized geodesic through `base` with unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HGeodesic {
    pub base: HPoint,
    pub direction: HTangent,
}

/// Standard position of a geodesic: `z = x0 + y0 R_α(w)` with `w` on the
/// upper imaginary axis.
#[derive(Debug, Clone, Copy)]
struct StdFrame {
    x0: f64,
    y0: f64,
    c: f64,
    s: f64,
}

impl StdFrame {
    fn new(base: HPoint, angle: f64) -> Self {
        let alpha = angle - std::f64::consts::FRAC_PI_2;
        let (s, c) = (0.5 * alpha).sin_cos();
        StdFrame {
            x0: base.x,
            y0: base.y,
            c,
            s,
        }
    }

    fn forward(&self, w: Complex64) -> Complex64 {
        let num = w * self.c + self.s;
        let den = -w * self.s + self.c;
        Complex64::new(self.x0, 0.0) + num / den * self.y0
    }

    fn forward_derivative(&self, w: Complex64) -> Complex64 {
        let den = -w * self.s + self.c;
        Complex64::new(self.y0, 0.0) / (den * den)
    }

    fn inverse(&self, z: Complex64) -> Complex64 {
        let w = (z - self.x0) / self.y0;
        // R_{-α}
        (w * self.c - self.s) / (w * self.s + self.c)
    }

    fn inverse_derivative(&self, z: Complex64) -> Complex64 {
        let w = (z - self.x0) / self.y0;
        let den = w * self.s + self.c;
        Complex64::new(1.0 / self.y0, 0.0) / (den * den)
    }
}

impl HGeodesic {
    /// The direction is normalized to unit length.
    pub fn new(base: HPoint, direction: HTangent) -> Self {
        HGeodesic {
            base,
            direction: HTangent { base, ..direction }.normalized(),
        }
    }

    fn frame(&self) -> StdFrame {
        StdFrame::new(self.base, self.direction.angle())
    }

    pub fn is_vertical(&self) -> bool {
        (self.direction.dx / self.base.y).abs() < VERTICAL_EPS
    }

    pub fn at(&self, t: f64) -> HPoint {
        if self.is_vertical() {
            let sign = self.direction.dy.signum();
            return HPoint {
                x: self.base.x,
                y: self.base.y * (sign * t).exp(),
            };
        }
        let w = Complex64::new(0.0, t.exp());
        HPoint::from_complex(self.frame().forward(w))
    }

    /// Unit tangent at parameter `t`.
    pub fn tangent_at(&self, t: f64) -> HTangent {
        let base = self.at(t);
        if self.is_vertical() {
            return HTangent::new(base, 0.0, self.direction.dy.signum() * base.y);
        }
        let w = Complex64::new(0.0, t.exp());
        let d = self.frame().forward_derivative(w) * w;
        HTangent::new(base, d.re, d.im).normalized()
    }

    /// Ideal endpoints `(t → -∞, t → +∞)` on the real axis; `None` is `∞`.
    pub fn endpoints(&self) -> (Option<f64>, Option<f64>) {
        if self.is_vertical() {
            let foot = Some(self.base.x);
            return if self.direction.dy > 0.0 {
                (foot, None)
            } else {
                (None, foot)
            };
        }
        let fr = self.frame();
        let ideal = |num: f64, den: f64| {
            if den == 0.0 {
                None
            } else {
                Some(fr.x0 + fr.y0 * num / den)
            }
        };
        (ideal(fr.s, fr.c), ideal(fr.c, -fr.s))
    }

    /// Position of `p` relative to this geodesic: the signed distance
    /// (positive to the left of the direction) and the foot parameter.
    pub fn project(&self, p: HPoint) -> (f64, f64) {
        let w = self.frame().inverse(p.to_complex());
        // the geodesic is the positive imaginary axis, left is Re w < 0
        let d = (-w.re / w.im).asinh();
        (d, 0.5 * w.norm_sqr().ln())
    }

    /// Parameters `(t_self, t_other)` of the crossing point, if the two
    /// geodesics cross transversally.
    pub fn crossing(&self, other: &HGeodesic) -> Option<(f64, f64)> {
        let fr = self.frame();
        let b = fr.inverse(other.base.to_complex());
        let d = fr.inverse_derivative(other.base.to_complex()) * other.direction.to_complex();
        let b = HPoint::from_complex(b);
        let moved = HGeodesic::new(b, HTangent::new(b, d.re, d.im));
        let (e0, e1) = moved.endpoints();
        let (e0, e1) = (e0?, e1?);
        if e0 * e1 >= 0.0 {
            return None;
        }
        let y = (-e0 * e1).sqrt();
        let hit = HPoint { x: 0.0, y };
        let (_, t_other) = moved.project(hit);
        Some((y.ln(), t_other))
    }
}

/// Hyperbolic distance, `cosh d = 1 + |p - q|² / (2 y_p y_q)`, evaluated as
/// `2 asinh(|p - q| / (2 sqrt(y_p y_q)))` for accuracy at short range.
pub fn dist(p: HPoint, q: HPoint) -> f64 {
    let chord = (p.x - q.x).hypot(p.y - q.y);
    2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
}

/// Point at arc length `t` along the geodesic from `p` in direction `v`.
pub fn exp_map(p: HPoint, v: HTangent, t: f64) -> HPoint {
    HGeodesic::new(p, v).at(t)
}

/// Parallel transport of `w` along `g` to parameter `t`: the angle with the
/// geodesic tangent and the norm are preserved.
pub fn parallel_transport(g: &HGeodesic, w: HTangent, t: f64) -> HTangent {
    let rel = w.angle() - g.direction.angle();
    let norm = w.norm();
    g.tangent_at(t).rotated(rel).scaled(norm)
}

/// Cayley map `z ↦ (z - i)/(z + i)` onto the unit disk.
pub fn to_disk(p: HPoint) -> (f64, f64) {
    let z = p.to_complex();
    let w = (z - Complex64::i()) / (z + Complex64::i());
    (w.re, w.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> HPoint {
        HPoint::new(x, y).unwrap()
    }

    fn rk4_geodesic(p: HPoint, v: HTangent, t: f64, n: usize) -> (HPoint, [f64; 2]) {
        // geodesic equation with Γ^x_xy = -1/y, Γ^y_xx = 1/y, Γ^y_yy = -1/y
        let rhs = |s: [f64; 4]| {
            let [_, y, vx, vy] = s;
            [vx, vy, 2.0 * vx * vy / y, (vy * vy - vx * vx) / y]
        };
        let mut s = [p.x, p.y, v.dx, v.dy];
        let h = t / n as f64;
        for _ in 0..n {
            let k1 = rhs(s);
            let k2 = rhs(std::array::from_fn(|i| s[i] + 0.5 * h * k1[i]));
            let k3 = rhs(std::array::from_fn(|i| s[i] + 0.5 * h * k2[i]));
            let k4 = rhs(std::array::from_fn(|i| s[i] + h * k3[i]));
            for i in 0..4 {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        (pt(s[0], s[1]), [s[2], s[3]])
    }

    #[test]
    fn distance_examples() {
        assert_eq!(dist(pt(0.0, 1.0), pt(0.0, 1.0)), 0.0);
        assert!((dist(pt(0.0, 1.0), pt(0.0, std::f64::consts::E)) - 1.0).abs() < 1e-15);
        let d = dist(pt(-1.0, 1.0), pt(1.0, 1.0));
        assert!((d - 3f64.acosh()).abs() < 1e-14);
        // arc length along the semicircle x = √2 cos φ, y = √2 sin φ: ∫ dφ / sin φ
        let (a, b) = (std::f64::consts::FRAC_PI_4, 3.0 * std::f64::consts::FRAC_PI_4);
        let arc = crate::quad::adaptive_simpson(&|phi: f64| Ok(1.0 / phi.sin()), a, b, 1e-13)
            .unwrap();
        assert!((d - arc).abs() < 1e-11);
        assert!((d - 1.7627472).abs() < 1e-7);
    }

    #[test]
    fn exp_map_examples() {
        let o = pt(0.0, 1.0);
        for t in [-2.0, 0.5, 3.0] {
            let q = exp_map(o, HTangent::unit_y(o), t);
            assert!(q.x.abs() < 1e-15);
            assert!((q.y - f64::exp(t)).abs() < 1e-12 * f64::exp(t));
        }
        let q = exp_map(o, HTangent::unit_x(o), 1.0);
        assert!((q.x - 1f64.tanh()).abs() < 1e-15);
        assert!((q.y - 1.0 / 1f64.cosh()).abs() < 1e-15);
        let (oracle, _) = rk4_geodesic(o, HTangent::unit_x(o), 1.0, 2000);
        assert!((q.x - oracle.x).abs() < 1e-11 && (q.y - oracle.y).abs() < 1e-11);
        assert_eq!(exp_map(o, HTangent::unit_x(o), 0.0), o);
    }

    #[test]
    fn exp_map_matches_geodesic_ode() {
        let p = pt(0.3, 0.7);
        for theta in [0.2, 1.9, -2.5, 3.0] {
            let v = HTangent::from_angle(p, theta);
            let (oracle, vel) = rk4_geodesic(p, v, 1.7, 4000);
            let q = exp_map(p, v, 1.7);
            assert!(dist(q, oracle) < 1e-10, "{theta}");
            let tan = HGeodesic::new(p, v).tangent_at(1.7);
            assert!((tan.dx - vel[0]).abs() < 1e-9 && (tan.dy - vel[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn transport_examples() {
        let o = pt(0.0, 1.0);
        let g = HGeodesic::new(o, HTangent::unit_y(o));
        let w = parallel_transport(&g, HTangent::unit_x(o), 1.5);
        assert!((w.dx - 1.5f64.exp()).abs() < 1e-12 && w.dy.abs() < 1e-12);
        let own = parallel_transport(&g, g.direction, 0.8);
        let tan = g.tangent_at(0.8);
        assert!((own.dx - tan.dx).abs() < 1e-14 && (own.dy - tan.dy).abs() < 1e-14);
    }

    #[test]
    fn transport_matches_christoffel_ode() {
        let p = pt(-0.4, 1.3);
        let v = HTangent::from_angle(p, 0.7);
        let w0 = HTangent::new(p, 0.5, -0.9);
        let g = HGeodesic::new(p, v);
        let n = 4000;
        let t_end = 2.0;
        let h = t_end / n as f64;
        // state (x, y, γ'x, γ'y, Wx, Wy)
        let rhs = |s: [f64; 6]| {
            let [_, y, vx, vy, wx, wy] = s;
            [
                vx,
                vy,
                2.0 * vx * vy / y,
                (vy * vy - vx * vx) / y,
                (vx * wy + vy * wx) / y,
                (vy * wy - vx * wx) / y,
            ]
        };
        let mut s = [p.x, p.y, v.dx, v.dy, w0.dx, w0.dy];
        for _ in 0..n {
            let k1 = rhs(s);
            let k2 = rhs(std::array::from_fn(|i| s[i] + 0.5 * h * k1[i]));
            let k3 = rhs(std::array::from_fn(|i| s[i] + 0.5 * h * k2[i]));
            let k4 = rhs(std::array::from_fn(|i| s[i] + h * k3[i]));
            for i in 0..6 {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        let w = parallel_transport(&g, w0, t_end);
        assert!((w.dx - s[4]).abs() < 1e-9 && (w.dy - s[5]).abs() < 1e-9);
        assert!((w.norm() - w0.norm()).abs() < 1e-12);
    }

    #[test]
    fn disk_examples() {
        assert_eq!(to_disk(pt(0.0, 1.0)), (0.0, 0.0));
        let (a, b) = to_disk(pt(1.0, 1.0));
        let oracle = Complex64::new(1.0, 0.0) / Complex64::new(1.0, 2.0);
        assert!((a - oracle.re).abs() < 1e-15 && (b - oracle.im).abs() < 1e-15);
        assert!((a - 0.2).abs() < 1e-15 && (b + 0.4).abs() < 1e-15);
        // the upper imaginary axis lands on the real diameter, i∞ on the point 1
        let (c, d) = to_disk(pt(0.0, 1e8));
        assert!((c - 1.0).abs() < 1e-7 && d.abs() < 1e-15);
    }

    #[test]
    fn endpoints_and_crossings() {
        let o = pt(0.0, 1.0);
        let g = HGeodesic::new(o, HTangent::unit_x(o));
        let (a, b) = g.endpoints();
        assert!((a.unwrap() + 1.0).abs() < 1e-15 && (b.unwrap() - 1.0).abs() < 1e-15);
        let v = HGeodesic::new(o, HTangent::unit_y(o));
        assert_eq!(v.endpoints(), (Some(0.0), None));
        let (t1, t2) = g.crossing(&v).unwrap();
        assert!(t1.abs() < 1e-15 && t2.abs() < 1e-15);
        let far = HGeodesic::new(pt(5.0, 1.0), HTangent::unit_y(pt(5.0, 1.0)));
        assert!(g.crossing(&far).is_none());
        // two vertical lines are asymptotic, not crossing
        assert!(v.crossing(&far).is_none());
        let q = pt(0.5, 2.0);
        let slant = HGeodesic::new(q, HTangent::from_angle(q, -2.0));
        let (s1, s2) = g.crossing(&slant).unwrap();
        assert!(dist(g.at(s1), slant.at(s2)) < 1e-12);
    }

    #[test]
    fn projection_is_signed_distance() {
        let o = pt(0.0, 1.0);
        let g = HGeodesic::new(o, HTangent::unit_y(o));
        let (d, t) = g.project(pt(-1.0, 1.0));
        assert!((d - 1f64.asinh()).abs() < 1e-15);
        assert!((t - 0.5 * 2f64.ln()).abs() < 1e-15);
        let (d, _) = g.project(pt(1.0, 1.0));
        assert!(d < 0.0);
    }

    fn arb_point() -> impl Strategy<Value = HPoint> {
        (-5.0..5.0f64, -3.0..3.0f64).prop_map(|(x, ly)| pt(x, ly.exp()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn triangle_inequality(p in arb_point(), q in arb_point(), r in arb_point()) {
            prop_assert!(dist(p, r) <= dist(p, q) + dist(q, r) + 1e-12);
            prop_assert_eq!(dist(p, q), dist(q, p));
        }

        #[test]
        fn disk_image_inside(p in arb_point()) {
            let (a, b) = to_disk(p);
            prop_assert!(a.hypot(b) < 1.0);
        }
    }

    proptest! {
        #[test]
        fn exp_map_additivity(p in arb_point(), theta in -3.1..3.1f64, s in -3.0..3.0f64, t in -3.0..3.0f64) {
            let v = HTangent::from_angle(p, theta);
            let direct = exp_map(p, v, s + t);
            let g = HGeodesic::new(p, v);
            let mid = g.at(s);
            let moved = exp_map(mid, parallel_transport(&g, v, s), t);
            prop_assert!(dist(direct, moved) < 1e-9);
            prop_assert!((dist(p, g.at(t)) - t.abs()).abs() < 1e-9);
        }

        #[test]
        fn transport_preserves_norm(p in arb_point(), theta in -3.0..3.0f64, dx in -2.0..2.0f64, dy in -2.0..2.0f64, t in -3.0..3.0f64) {
            let g = HGeodesic::new(p, HTangent::from_angle(p, theta));
            let w = HTangent::new(p, dx, dy);
            let moved = parallel_transport(&g, w, t);
            prop_assert!((moved.norm() - w.norm()).abs() < 1e-10 * (1.0 + w.norm()));
            prop_assert!((g.tangent_at(t).norm() - 1.0).abs() < 1e-12);
        }
    }
}
