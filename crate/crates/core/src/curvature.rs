//! Finite-difference curvature of a metric on the `(x, u, v)` chart.
//!
//! Conventions: `R(X, Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z`, components
//! `R(∂_j, ∂_k)∂_i = R^l_ijk ∂_l`, lowered `R_lijk = ⟨R(∂_j, ∂_k)∂_i, ∂_l⟩`, so
//! that `R_xuxu = sec(∂x, ∂u) |∂x ∧ ∂u|²`, and `Ric_ik = R^j_kji`.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{metric_at, ChartPoint, MetricSpec};

pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Points closer than this many steps to a non-smooth `x` are skipped.
pub const NONSMOOTH_MARGIN: f64 = 10.0;

pub type Christoffel = [[[f64; 3]; 3]; 3];
pub type Riemann = [[[[f64; 3]; 3]; 3]; 3];

pub trait MetricField {
    fn metric(&self, p: &ChartPoint) -> Result<Matrix3<f64>>;

    /// Radius around `p` on which the field is smooth.
    fn smooth_radius(&self, _p: &ChartPoint) -> f64 {
        f64::INFINITY
    }
}

impl MetricField for MetricSpec {
    fn metric(&self, p: &ChartPoint) -> Result<Matrix3<f64>> {
        metric_at(self, p)
    }

    fn smooth_radius(&self, p: &ChartPoint) -> f64 {
        let mut r = self.nonsmooth.distance(p.x);
        if let Some((lo, hi)) = self.domain {
            r = r.min(p.x - lo).min(hi - p.x);
        }
        r
    }
}

/// A metric given by a closure.
pub struct FnField<F>(pub F);

impl<F> MetricField for FnField<F>
where
    F: Fn(&ChartPoint) -> Result<Matrix3<f64>>,
{
    fn metric(&self, p: &ChartPoint) -> Result<Matrix3<f64>> {
        (self.0)(p)
    }
}

/// The Euclidean metric on the chart.
pub struct IdentityField;

impl MetricField for IdentityField {
    fn metric(&self, _p: &ChartPoint) -> Result<Matrix3<f64>> {
        Ok(Matrix3::identity())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub point: [f64; 3],
    /// `gamma[k][i][j] = Γ^k_ij`.
    pub gamma: Christoffel,
    /// Fully lowered `R_lijk`.
    pub riemann: Riemann,
    pub ricci: [[f64; 3]; 3],
    /// Eigenvalues of `g⁻¹ Ric`, ascending.
    pub eigenvalues: [f64; 3],
    /// `g`-unit eigenvector of the eigenvalue nearest 0.
    pub kernel: [f64; 3],
    pub scalar: f64,
    /// Error estimate for the Riemann components: Richardson residual plus
    /// a rounding bound.
    pub tolerance: f64,
}

fn shifted(p: &ChartPoint, axis: usize, delta: f64) -> ChartPoint {
    let mut c = p.as_array();
    c[axis] += delta;
    ChartPoint::from_array(c)
}

fn check_step(fd_step: f64) -> Result<()> {
    if fd_step > 0.0 && fd_step.is_finite() {
        Ok(())
    } else {
        Err(Error::StepSize(fd_step))
    }
}

fn inverse(g: &Matrix3<f64>, p: &ChartPoint) -> Result<Matrix3<f64>> {
    let det = g.determinant();
    let scale = g.norm().powi(3).max(f64::MIN_POSITIVE);
    if !(det.abs() > 1e-14 * scale) {
        return Err(Error::SingularMetric(p.x, p.u, p.v));
    }
    g.try_inverse().ok_or(Error::SingularMetric(p.x, p.u, p.v))
}

/// `∂_l g` by central differences of step `h`.
fn metric_derivatives<M: MetricField + ?Sized>(
    field: &M,
    p: &ChartPoint,
    h: f64,
) -> Result<[Matrix3<f64>; 3]> {
    let mut d = [Matrix3::zeros(); 3];
    for (l, dl) in d.iter_mut().enumerate() {
        let plus = field.metric(&shifted(p, l, h))?;
        let minus = field.metric(&shifted(p, l, -h))?;
        *dl = (plus - minus) / (2.0 * h);
    }
    Ok(d)
}

fn christoffel_from(ginv: &Matrix3<f64>, dg: &[Matrix3<f64>; 3]) -> Christoffel {
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for l in 0..3 {
                    acc += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gk[i][j] = 0.5 * acc;
            }
        }
    }
    gamma
}

/// Christoffel symbols from plain central differences of step `h`.
pub fn christoffel_unextrapolated<M: MetricField + ?Sized>(
    field: &M,
    p: &ChartPoint,
    h: f64,
) -> Result<Christoffel> {
    check_step(h)?;
    let g = field.metric(p)?;
    let ginv = inverse(&g, p)?;
    Ok(christoffel_from(&ginv, &metric_derivatives(field, p, h)?))
}

fn combine3(a: &Christoffel, b: &Christoffel, f: impl Fn(f64, f64) -> f64) -> Christoffel {
    std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| f(a[k][i][j], b[k][i][j]))))
}

fn combine4(a: &Riemann, b: &Riemann, f: impl Fn(f64, f64) -> f64) -> Riemann {
    std::array::from_fn(|l| {
        std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| f(a[l][i][j][k], b[l][i][j][k]))))
    })
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// `Γ^k_ij`, Richardson-extrapolated from steps `fd_step` and `fd_step / 2`.
pub fn christoffel<M: MetricField + ?Sized>(
    field: &M,
    p: &ChartPoint,
    fd_step: f64,
) -> Result<Christoffel> {
    let coarse = christoffel_unextrapolated(field, p, fd_step)?;
    let fine = christoffel_unextrapolated(field, p, 0.5 * fd_step)?;
    Ok(combine3(&coarse, &fine, richardson))
}

/// Lowered Riemann tensor from nested central differences of step `h`.
pub fn riemann_unextrapolated<M: MetricField + ?Sized>(
    field: &M,
    p: &ChartPoint,
    h: f64,
) -> Result<Riemann> {
    check_step(h)?;
    let g = field.metric(p)?;
    let gamma = christoffel_unextrapolated(field, p, h)?;
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
    for (m, dm) in dgamma.iter_mut().enumerate() {
        let plus = christoffel_unextrapolated(field, &shifted(p, m, h), h)?;
        let minus = christoffel_unextrapolated(field, &shifted(p, m, -h), h)?;
        *dm = combine3(&plus, &minus, |a, b| (a - b) / (2.0 * h));
    }
    // R^l_ijk = ∂_j Γ^l_ki - ∂_k Γ^l_ji + Γ^l_jm Γ^m_ki - Γ^l_km Γ^m_ji
    let mut upper = [[[[0.0; 3]; 3]; 3]; 3];
    for (l, ul) in upper.iter_mut().enumerate() {
        for (i, uli) in ul.iter_mut().enumerate() {
            for (j, ulij) in uli.iter_mut().enumerate() {
                for (k, r) in ulij.iter_mut().enumerate() {
                    let mut acc = dgamma[j][l][k][i] - dgamma[k][l][j][i];
                    for m in 0..3 {
                        acc += gamma[l][j][m] * gamma[m][k][i] - gamma[l][k][m] * gamma[m][j][i];
                    }
                    *r = acc;
                }
            }
        }
    }
    Ok(std::array::from_fn(|a| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|k| (0..3).map(|l| g[(a, l)] * upper[l][i][j][k]).sum()))
        })
    }))
}

fn max_abs4(r: &Riemann) -> f64 {
    r.iter().flatten().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Richardson-extrapolated lowered Riemann tensor and its error estimate.
pub fn riemann_with_tolerance<M: MetricField + ?Sized>(
    field: &M,
    p: &ChartPoint,
    fd_step: f64,
) -> Result<(Riemann, f64)> {
    let coarse = riemann_unextrapolated(field, p, fd_step)?;
    let fine = riemann_unextrapolated(field, p, 0.5 * fd_step)?;
    let extrapolated = combine4(&coarse, &fine, richardson);
    let residual = max_abs4(&combine4(&coarse, &fine, |a, b| a - b)) / 3.0;
    // nested second differences at step h/2 amplify rounding by ~1/h²
    let g = field.metric(p)?;
    let hf = 0.5 * fd_step;
    let rounding = 64.0 * f64::EPSILON * g.norm().max(1.0) / (hf * hf);
    Ok((extrapolated, residual + rounding))
}

pub fn riemann<M: MetricField + ?Sized>(field: &M, p: &ChartPoint, fd_step: f64) -> Result<Riemann> {
    Ok(riemann_with_tolerance(field, p, fd_step)?.0)
}

/// `Ric_ik = g^{la} R_{a k l i}`.
pub fn ricci_from(g: &Matrix3<f64>, r: &Riemann, p: &ChartPoint) -> Result<Matrix3<f64>> {
    let ginv = inverse(g, p)?;
    let mut ric = Matrix3::zeros();
    for i in 0..3 {
        for k in 0..3 {
            let mut acc = 0.0;
            for l in 0..3 {
                for a in 0..3 {
                    acc += ginv[(l, a)] * r[a][k][l][i];
                }
            }
            ric[(i, k)] = acc;
        }
    }
    Ok(0.5 * (ric + ric.transpose()))
}

/// Eigenvalues of `Ric x = λ g x` (ascending) with `g`-orthonormal
/// eigenvectors as columns.
pub fn generalized_eigen(
    g: &Matrix3<f64>,
    ric: &Matrix3<f64>,
    p: &ChartPoint,
) -> Result<([f64; 3], Matrix3<f64>)> {
    let chol = g.cholesky().ok_or(Error::SingularMetric(p.x, p.u, p.v))?;
    let l = chol.l();
    let linv = l.try_inverse().ok_or(Error::SingularMetric(p.x, p.u, p.v))?;
    let m = linv * ric * linv.transpose();
    let sym = SymmetricEigen::new(0.5 * (m + m.transpose()));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| sym.eigenvalues[a].total_cmp(&sym.eigenvalues[b]));
    let vals = order.map(|i| sym.eigenvalues[i]);
    let mut vecs = Matrix3::zeros();
    for (col, &i) in order.iter().enumerate() {
        let x = linv.transpose() * sym.eigenvectors.column(i);
        vecs.set_column(col, &x);
    }
    Ok((vals, vecs))
}

fn kernel_of(vals: &[f64; 3], vecs: &Matrix3<f64>) -> Vector3<f64> {
    let idx = (0..3)
        .min_by(|&a, &b| vals[a].abs().total_cmp(&vals[b].abs()))
        .unwrap_or(2);
    let mut k: Vector3<f64> = vecs.column(idx).into();
    let lead = (0..3).max_by(|&a, &b| k[a].abs().total_cmp(&k[b].abs())).unwrap_or(0);
    if k[lead] < 0.0 {
        k = -k;
    }
    k
}

/// Sorted Ricci eigenvalues and the `g`-unit kernel direction.
pub fn ricci_eigenvalues<M: MetricField + ?Sized>(
    field: &M,
    p: &ChartPoint,
    fd_step: f64,
) -> Result<([f64; 3], Vector3<f64>)> {
    let r = curvature_report(field, p, fd_step)?;
    Ok((r.eigenvalues, Vector3::from(r.kernel)))
}

/// Full report at `p`.
pub fn curvature_report<M: MetricField + ?Sized>(
    field: &M,
    p: &ChartPoint,
    fd_step: f64,
) -> Result<CurvatureReport> {
    let gamma = christoffel(field, p, fd_step)?;
    let (riemann, tolerance) = riemann_with_tolerance(field, p, fd_step)?;
    let g = field.metric(p)?;
    let ric = ricci_from(&g, &riemann, p)?;
    let (eigenvalues, vecs) = generalized_eigen(&g, &ric, p)?;
    let kernel = kernel_of(&eigenvalues, &vecs);
    let ginv = inverse(&g, p)?;
    let scalar = (ginv * ric).trace();
    Ok(CurvatureReport {
        point: p.as_array(),
        gamma,
        riemann,
        ricci: std::array::from_fn(|i| std::array::from_fn(|j| ric[(i, j)])),
        eigenvalues,
        kernel: [kernel[0], kernel[1], kernel[2]],
        scalar,
        tolerance,
    })
}

/// Report, or `None` when `p` is within `NONSMOOTH_MARGIN · fd_step` of a
/// non-smooth point of the field.
pub fn curvature_report_checked<M: MetricField + ?Sized>(
    field: &M,
    p: &ChartPoint,
    fd_step: f64,
) -> Result<Option<CurvatureReport>> {
    check_step(fd_step)?;
    if field.smooth_radius(p) < NONSMOOTH_MARGIN * fd_step {
        return Ok(None);
    }
    curvature_report(field, p, fd_step).map(Some)
}

/// Largest violation of the pair symmetries of `R` and the first
/// Bianchi identity.
pub fn symmetry_defect(r: &Riemann) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let v = r[a][b][c][d];
                    worst = worst
                        .max((v + r[b][a][c][d]).abs())
                        .max((v + r[a][b][d][c]).abs())
                        .max((v - r[c][d][a][b]).abs())
                        .max((v + r[a][c][d][b] + r[a][d][b][c]).abs());
                }
            }
        }
    }
    worst
}

/// `max |R(k, ·, ·, ·)|`: vanishes when every plane containing `k` is flat.
pub fn kernel_residual(r: &Riemann, k: &Vector3<f64>) -> f64 {
    let mut worst = 0.0f64;
    for b in 0..3 {
        for c in 0..3 {
            for d in 0..3 {
                let v: f64 = (0..3).map(|a| k[a] * r[a][b][c][d]).sum();
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

/// `g`-angle between `k` and `∂v`.
pub fn angle_to_dv(g: &Matrix3<f64>, k: &Vector3<f64>) -> f64 {
    let dv = Vector3::new(0.0, 0.0, 1.0);
    let ip = |a: &Vector3<f64>, b: &Vector3<f64>| (a.transpose() * g * b)[(0, 0)];
    let cos = ip(k, &dv) / (ip(k, k).sqrt() * ip(&dv, &dv).sqrt());
    cos.abs().min(1.0).acos()
}
