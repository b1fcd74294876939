//! Closed curves on the ellipsoid x²/a² + y²/b² + z²/c² = 1: discrete energy,
//! plane-slicing sweepouts, Birkhoff shortening and the three widths.

use super::{pinv_solve, width, ConstrainedEnergy, MinmaxReport, WidthOptions};
use crate::algebra::Vec3;
use crate::error::{LabError, Result};
use crate::grid::adaptive_quadrature;
use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;

use super::Sweepout;

/// Minimum points per curve and parameter samples per axis.
pub const MIN_CURVE_POINTS: usize = 64;
pub const MIN_PARAM_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipsoidSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl EllipsoidSpec {
    /// Requires 0 < a ≤ b ≤ c; ties are allowed (the sphere is a valid spec).
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && a <= b && b <= c && c.is_finite()) {
            return Err(LabError::BadParameter(format!(
                "semi-axes must satisfy 0 < a <= b <= c, got ({a}, {b}, {c})"
            )));
        }
        Ok(EllipsoidSpec { a, b, c })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| LabError::Config(format!("bad ellipsoid {s:?}")))?;
        if v.len() != 3 {
            return Err(LabError::Config(format!("ellipsoid needs 3 semi-axes, got {s:?}")));
        }
        Self::new(v[0], v[1], v[2]).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn is_strict(&self) -> bool {
        self.a < self.b && self.b < self.c
    }

    pub fn axes(&self) -> Vec3 {
        Vec3::new(self.a, self.b, self.c)
    }

    /// Diagonal of Q in xᵀQx = 1.
    pub fn q(&self) -> Vec3 {
        self.axes().map(|s| 1.0 / (s * s))
    }

    pub fn level(&self, x: &Vec3) -> f64 {
        x.component_mul(&self.q()).dot(x)
    }

    pub fn normal(&self, x: &Vec3) -> Vec3 {
        x.component_mul(&self.q()).normalize()
    }

    /// Nearest point of the ellipsoid to p: x = (I + μQ)⁻¹p with μ from a
    /// safeguarded Newton iteration.
    pub fn nearest_point(&self, p: &Vec3) -> Vec3 {
        let q = self.q();
        if p.norm() < 1e-300 {
            return Vec3::new(0.0, 0.0, self.c);
        }
        let f = |mu: f64| -> (f64, f64) {
            let mut v = -1.0;
            let mut d = 0.0;
            for j in 0..3 {
                let s = 1.0 + mu * q[j];
                v += q[j] * p[j] * p[j] / (s * s);
                d += -2.0 * q[j] * q[j] * p[j] * p[j] / (s * s * s);
            }
            (v, d)
        };
        let qmax = q.max();
        let (mut lo, mut hi) = (-1.0 / qmax, f64::INFINITY);
        let mut mu = 0.0;
        for _ in 0..200 {
            let (v, d) = f(mu);
            if v > 0.0 {
                lo = mu;
            } else {
                hi = mu;
            }
            if v.abs() < 1e-15 {
                break;
            }
            let mut next = mu - v / d;
            if !(next > lo && next < hi) {
                next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * mu.abs() + 1.0 };
            }
            if (next - mu).abs() <= 1e-16 * (1.0 + mu.abs()) {
                mu = next;
                break;
            }
            mu = next;
        }
        Vec3::new(
            p[0] / (1.0 + mu * q[0]),
            p[1] / (1.0 + mu * q[1]),
            p[2] / (1.0 + mu * q[2]),
        )
    }
}

/// Perimeter of the ellipse with semi-axes p, q.
pub fn ellipse_perimeter(p: f64, q: f64) -> f64 {
    let f = |t: f64| (p * p * t.sin().powi(2) + q * q * t.cos().powi(2)).sqrt();
    adaptive_quadrature(&f, 0.0, 2.0 * PI, 1e-13)
}

fn point(x: &DVector<f64>, i: usize) -> Vec3 {
    Vec3::new(x[3 * i], x[3 * i + 1], x[3 * i + 2])
}

fn set_point(x: &mut DVector<f64>, i: usize, v: &Vec3) {
    x[3 * i] = v[0];
    x[3 * i + 1] = v[1];
    x[3 * i + 2] = v[2];
}

/// Polygon length Σ|u_{i+1} − u_i|.
pub fn polygon_length(x: &DVector<f64>) -> f64 {
    let m = x.len() / 3;
    (0..m)
        .map(|i| (point(x, (i + 1) % m) - point(x, i)).norm())
        .sum()
}

/// E(u) = m Σ|u_{i+1} − u_i|², the discrete 2π∫|∂_θu|² of a closed curve with m
/// points; √E equals the polygon length for equal chords.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurveEnergy {
    pub spec: EllipsoidSpec,
    pub m: usize,
}

impl CurveEnergy {
    pub fn new(spec: EllipsoidSpec, m: usize) -> Result<Self> {
        if m < MIN_CURVE_POINTS {
            return Err(LabError::GridTooCoarse(format!(
                "{m} points per curve, need {MIN_CURVE_POINTS}"
            )));
        }
        Ok(CurveEnergy { spec, m })
    }

    fn laplace(&self, x: &DVector<f64>, i: usize) -> Vec3 {
        let m = self.m;
        2.0 * point(x, i) - point(x, (i + m - 1) % m) - point(x, (i + 1) % m)
    }

    /// Multipliers ν_i with ∇E_i ≈ ν_i ∇c_i, c_i = u_iᵀQu_i − 1.
    fn multipliers(&self, x: &DVector<f64>, g: &DVector<f64>) -> Vec<f64> {
        let q = self.spec.q();
        (0..self.m)
            .map(|i| {
                let dc = 2.0 * point(x, i).component_mul(&q);
                point(g, i).dot(&dc) / dc.norm_squared()
            })
            .collect()
    }

    /// Fraction of the discrete curvature vector tangent to the surface; 0 for a
    /// discrete geodesic.
    pub fn stationarity(&self, x: &DVector<f64>) -> f64 {
        let mut tang: f64 = 0.0;
        let mut all: f64 = 0.0;
        for i in 0..self.m {
            let l = self.laplace(x, i);
            let n = self.spec.normal(&point(x, i));
            tang = tang.max((l - n * n.dot(&l)).norm());
            all = all.max(l.norm());
        }
        if all == 0.0 {
            0.0
        } else {
            tang / all
        }
    }
}

impl ConstrainedEnergy for CurveEnergy {
    fn dim(&self) -> usize {
        3 * self.m
    }

    fn energy(&self, x: &DVector<f64>) -> f64 {
        let m = self.m;
        self.m as f64
            * (0..m)
                .map(|i| (point(x, (i + 1) % m) - point(x, i)).norm_squared())
                .sum::<f64>()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(3 * self.m);
        for i in 0..self.m {
            set_point(&mut g, i, &(self.laplace(x, i) * (2.0 * self.m as f64)));
        }
        g
    }

    fn tangent_gradient(&self, x: &DVector<f64>, grad: &DVector<f64>) -> DVector<f64> {
        let mut d = grad.clone();
        for i in 0..self.m {
            let n = self.spec.normal(&point(x, i));
            let g = point(grad, i);
            set_point(&mut d, i, &(g - n * n.dot(&g)));
        }
        d
    }

    fn metric_norm(&self, _x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        v.norm()
    }

    fn retract(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = x.clone();
        for i in 0..self.m {
            set_point(&mut y, i, &self.spec.nearest_point(&point(x, i)));
        }
        y
    }

    fn constraint_residual(&self, x: &DVector<f64>) -> f64 {
        (0..self.m)
            .map(|i| (self.spec.level(&point(x, i)) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn lagrangian_hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = self.m;
        let s = 2.0 * m as f64;
        let nu = self.multipliers(x, &self.gradient(x));
        let q = self.spec.q();
        let mut h = DMatrix::zeros(3 * m, 3 * m);
        for i in 0..m {
            let (p, n) = ((i + m - 1) % m, (i + 1) % m);
            for k in 0..3 {
                h[(3 * i + k, 3 * i + k)] += 2.0 * s - 2.0 * nu[i] * q[k];
                h[(3 * i + k, 3 * p + k)] -= s;
                h[(3 * i + k, 3 * n + k)] -= s;
            }
        }
        h
    }

    fn tangent_basis(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = self.m;
        let mut t = DMatrix::zeros(3 * m, 2 * m);
        for i in 0..m {
            let n = self.spec.normal(&point(x, i));
            let helper = if n[0].abs() < 0.9 { Vec3::x() } else { Vec3::y() };
            let e1 = n.cross(&helper).normalize();
            let e2 = n.cross(&e1);
            for k in 0..3 {
                t[(3 * i + k, 2 * i)] = e1[k];
                t[(3 * i + k, 2 * i + 1)] = e2[k];
            }
        }
        t
    }

    fn index_gram(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        t.transpose() * t
    }

    fn polish(&self, x: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
        let m = self.m;
        let q = self.spec.q();
        let mut u = self.retract(x);
        let mut nu = self.multipliers(&u, &self.gradient(&u));
        for _ in 0..40 {
            if self.grad_norm(&u) < tol && self.constraint_residual(&u) < 1e-13 {
                return Ok(u);
            }
            let g = self.gradient(&u);
            let n3 = 3 * m;
            let mut j = DMatrix::zeros(4 * m, 4 * m);
            let s = 2.0 * m as f64;
            let mut r = DVector::zeros(4 * m);
            for i in 0..m {
                let (p, nx) = ((i + m - 1) % m, (i + 1) % m);
                let ui = point(&u, i);
                let dc = 2.0 * ui.component_mul(&q);
                for k in 0..3 {
                    j[(3 * i + k, 3 * i + k)] += 2.0 * s - 2.0 * nu[i] * q[k];
                    j[(3 * i + k, 3 * p + k)] -= s;
                    j[(3 * i + k, 3 * nx + k)] -= s;
                    j[(3 * i + k, n3 + i)] = -dc[k];
                    j[(n3 + i, 3 * i + k)] = dc[k];
                    r[3 * i + k] = g[3 * i + k] - nu[i] * dc[k];
                }
                r[n3 + i] = self.spec.level(&ui) - 1.0;
            }
            let d = pinv_solve(j, &r, 1e-12);
            for i in 0..m {
                let v = point(&u, i) + Vec3::new(d[3 * i], d[3 * i + 1], d[3 * i + 2]);
                set_point(&mut u, i, &v);
                nu[i] += d[n3 + i];
            }
            u = self.retract(&u);
        }
        let g = self.grad_norm(&u);
        if g < tol {
            Ok(u)
        } else {
            Err(LabError::NoConvergence { iterations: 40, grad: g })
        }
    }
}

/// Constant-speed parametrization (m points) of the slice {⟨x, d⟩ = t·h(d)} of the
/// ellipsoid, h the support function; |t| ≥ 1 gives a point curve.
pub fn plane_slice(spec: &EllipsoidSpec, d: &Vec3, t: f64, m: usize) -> DVector<f64> {
    let d = d.normalize();
    let qinv = spec.axes().map(|s| s * s);
    let qd = d.component_mul(&qinv);
    let rho = d.dot(&qd).sqrt();
    let x0 = qd * (t / rho);
    let r2 = 1.0 - t * t;
    let mut out = DVector::zeros(3 * m);
    if r2 <= 1e-14 {
        for i in 0..m {
            set_point(&mut out, i, &x0);
        }
        return out;
    }
    let helper = if d[0].abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = d.cross(&helper).normalize();
    let e2 = d.cross(&e1);
    let q = spec.q();
    let s = Matrix2::new(
        e1.component_mul(&q).dot(&e1),
        e1.component_mul(&q).dot(&e2),
        e2.component_mul(&q).dot(&e1),
        e2.component_mul(&q).dot(&e2),
    );
    let eig = SymmetricEigen::new(s);
    let (s1, s2) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let (v1, v2) = (eig.eigenvectors.column(0), eig.eigenvectors.column(1));
    let f1 = (e1 * v1[0] + e2 * v1[1]) * (r2 / s1).sqrt();
    let mut f2 = (e1 * v2[0] + e2 * v2[1]) * (r2 / s2).sqrt();
    // keep (f1, f2, d) positively oriented
    if f1.cross(&f2).dot(&d) < 0.0 {
        f2 = -f2;
    }
    let at = |phi: f64| x0 + f1 * phi.cos() + f2 * phi.sin();
    let fine = 64 * m;
    let mut cum = vec![0.0; fine + 1];
    for j in 0..fine {
        let (a, b) = (
            2.0 * PI * j as f64 / fine as f64,
            2.0 * PI * (j + 1) as f64 / fine as f64,
        );
        // Simpson on the speed
        let speed = |p: f64| (-f1 * p.sin() + f2 * p.cos()).norm();
        cum[j + 1] = cum[j] + (b - a) / 6.0 * (speed(a) + 4.0 * speed(0.5 * (a + b)) + speed(b));
    }
    let total = cum[fine];
    let mut j = 0;
    let mut phi = vec![0.0; m];
    for (i, p) in phi.iter_mut().enumerate() {
        let target = total * i as f64 / m as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
        *p = 2.0 * PI * (j as f64 + frac) / fine as f64;
    }
    // equal arc length leaves O(κ²s³) chord spread; equalize chords so that
    // the discrete energy equals the squared polygon length
    let speed = |p: f64| (-f1 * p.sin() + f2 * p.cos()).norm();
    for _ in 0..100 {
        let pts: Vec<Vec3> = phi.iter().map(|p| at(*p)).collect();
        let chords: Vec<f64> = (0..m).map(|i| (pts[(i + 1) % m] - pts[i]).norm()).collect();
        let len: f64 = chords.iter().sum();
        let mut acc = 0.0;
        let mut worst: f64 = 0.0;
        for i in 1..m {
            acc += chords[i - 1];
            let d = (len * i as f64 / m as f64 - acc) / speed(phi[i]);
            worst = worst.max(d.abs());
            phi[i] += d;
        }
        if worst < 1e-15 {
            break;
        }
    }
    for (i, p) in phi.iter().enumerate() {
        set_point(&mut out, i, &spec.nearest_point(&at(*p)));
    }
    out
}

/// Slicing normal for a level and its angle parameters (each in [−1, 1]).
pub fn slice_direction(level: usize, angles: &[f64]) -> Result<Vec3> {
    let (i, j, k) = (Vec3::x(), Vec3::y(), Vec3::z());
    let turn = |s: f64| 0.5 * PI + 0.5 * PI * s;
    match (level, angles) {
        (1, []) => Ok(k),
        (2, [s]) => Ok(k * turn(*s).cos() + j * turn(*s).sin()),
        (3, [sigma, s]) => {
            let inner = j * turn(*sigma).cos() + i * turn(*sigma).sin();
            Ok(k * turn(*s).cos() + inner * turn(*s).sin())
        }
        _ => Err(LabError::BadLevel(level)),
    }
}

/// Level 1: (t); level 2: (s, t); level 3: (σ, s, t). n samples per axis (bumped to
/// odd so that 0 is a node), m points per curve. Slices on the faces of the
/// parameter cube carry the lower-level family or a point and are fixed.
pub fn slicing_sweepout(spec: &EllipsoidSpec, level: usize, n: usize, m: usize) -> Result<Sweepout> {
    if !(1..=3).contains(&level) {
        return Err(LabError::BadLevel(level));
    }
    if n < MIN_PARAM_SAMPLES || m < MIN_CURVE_POINTS {
        return Err(LabError::GridTooCoarse(format!(
            "{n} parameter samples and {m} curve points, need {MIN_PARAM_SAMPLES} and {MIN_CURVE_POINTS}"
        )));
    }
    let n = n | 1;
    let axis: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let total = n.pow(level as u32);
    let mut params = Vec::with_capacity(total);
    let mut configs = Vec::with_capacity(total);
    let mut fixed = Vec::with_capacity(total);
    for idx in 0..total {
        let mut p = vec![0.0; level];
        let mut r = idx;
        for d in (0..level).rev() {
            p[d] = axis[r % n];
            r /= n;
        }
        let (angles, t) = p.split_at(level - 1);
        let dir = slice_direction(level, angles)?;
        configs.push(plane_slice(spec, &dir, t[0], m));
        fixed.push(p.iter().any(|v| v.abs() == 1.0));
        params.push(p);
    }
    Ok(Sweepout {
        shape: vec![n; level],
        params,
        configs,
        fixed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BirkhoffResult {
    #[serde(skip)]
    pub curve: DVector<f64>,
    pub iterations: usize,
    pub length: f64,
    pub energy: f64,
    pub stationarity: f64,
    /// Energy after each sweep.
    pub energies: Vec<f64>,
}

/// Birkhoff shortening: alternately replace even and odd points by the nearest
/// ellipsoid point to the midpoint of their neighbours. Each half-sweep minimizes
/// the energy over the moved points, so the energy never increases.
pub fn birkhoff_shorten(
    e: &CurveEnergy,
    curve: &DVector<f64>,
    max_iter: usize,
    stationarity_tol: f64,
    collapse_length: f64,
) -> Result<BirkhoffResult> {
    let m = e.m;
    let mut u = e.retract(curve);
    let mut energies = vec![e.energy(&u)];
    let mut iterations = 0;
    while iterations < max_iter {
        let len = polygon_length(&u);
        if len < collapse_length {
            return Err(LabError::CurveCollapse(len));
        }
        if e.stationarity(&u) < stationarity_tol {
            break;
        }
        for parity in 0..2 {
            for i in (parity..m).step_by(2) {
                let mid = 0.5 * (point(&u, (i + m - 1) % m) + point(&u, (i + 1) % m));
                let v = e.spec.nearest_point(&mid);
                set_point(&mut u, i, &v);
            }
        }
        energies.push(e.energy(&u));
        iterations += 1;
    }
    let len = polygon_length(&u);
    if len < collapse_length {
        return Err(LabError::CurveCollapse(len));
    }
    Ok(BirkhoffResult {
        iterations,
        length: len,
        energy: e.energy(&u),
        stationarity: e.stationarity(&u),
        energies,
        curve: u,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipsoidWidth {
    pub level: usize,
    /// √ of the polished critical energy.
    pub width: f64,
    /// √ of the max energy over the deformed sweepout.
    pub sweep_max: f64,
    /// Perimeter of the principal ellipse the level should realize.
    pub oracle: f64,
    pub birkhoff_stationarity: f64,
    pub report: MinmaxReport,
}

/// Widths of the three slicing levels.
pub fn ellipsoid_widths(
    spec: &EllipsoidSpec,
    n: usize,
    m: usize,
    opts: &WidthOptions,
) -> Result<Vec<EllipsoidWidth>> {
    let e = CurveEnergy::new(*spec, m)?;
    let oracles = [
        ellipse_perimeter(spec.a, spec.b),
        ellipse_perimeter(spec.a, spec.c),
        ellipse_perimeter(spec.b, spec.c),
    ];
    let mut out = Vec::new();
    for level in 1..=3 {
        let mut sw = slicing_sweepout(spec, level, n, m)?;
        let (report, _) = width(&mut sw, &e, opts)?;
        let b = birkhoff_shorten(&e, &report.candidate, 1, 0.0, 0.0)?;
        out.push(EllipsoidWidth {
            level,
            width: report.critical_value.sqrt(),
            sweep_max: report.width.sqrt(),
            oracle: oracles[level - 1],
            birkhoff_stationarity: b.stationarity,
            report,
        });
    }
    Ok(out)
}
