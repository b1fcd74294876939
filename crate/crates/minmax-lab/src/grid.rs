//! Product grids, spectral differentiation, quadrature and degrees by integration.

use crate::algebra::{det4, Vec3, Vec4};
use crate::error::{LabError, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Fewest nodes an axis may have before differentiation is refused.
pub const MIN_AXIS_NODES: usize = 8;

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    (
        x.iter().map(|t| a + h * (t + 1.0)).collect(),
        w.iter().map(|v| v * h.abs()).collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum AxisKind {
    Periodic { period: f64 },
    Legendre { a: f64, b: f64 },
}

/// One axis of a product grid.
#[derive(Clone, Debug)]
pub struct Axis {
    pub kind: AxisKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    diff: DMatrix<f64>,
}

impl Axis {
    /// Uniform nodes k·period/n starting at `offset`.
    pub fn periodic(n: usize, period: f64) -> Self {
        Self::periodic_from(n, period, 0.0)
    }

    pub fn periodic_from(n: usize, period: f64, offset: f64) -> Self {
        let h = period / n as f64;
        let nodes = (0..n).map(|k| offset + k as f64 * h).collect();
        let weights = vec![h; n];
        let diff = periodic_diff(n, period);
        Axis {
            kind: AxisKind::Periodic { period },
            nodes,
            weights,
            diff,
        }
    }

    /// Gauss–Legendre interior nodes on (a, b).
    pub fn legendre(n: usize, a: f64, b: f64) -> Self {
        let (nodes, weights) = gauss_legendre_on(n, a, b);
        let diff = barycentric_diff(&nodes);
        Axis {
            kind: AxisKind::Legendre { a, b },
            nodes,
            weights,
            diff,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, AxisKind::Periodic { .. })
    }

    pub fn measure(&self) -> f64 {
        match self.kind {
            AxisKind::Periodic { period } => period,
            AxisKind::Legendre { a, b } => (b - a).abs(),
        }
    }

    pub fn diff_matrix(&self) -> &DMatrix<f64> {
        &self.diff
    }
}

fn periodic_diff(n: usize, period: f64) -> DMatrix<f64> {
    let h = 2.0 * PI / n as f64;
    let scale = 2.0 * PI / period;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return 0.0;
        }
        let k = i as f64 - j as f64;
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        let v = if n % 2 == 0 {
            0.5 * sign / (0.5 * k * h).tan()
        } else {
            0.5 * sign / (0.5 * k * h).sin()
        };
        v * scale
    })
}

fn barycentric_diff(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    // log-magnitude barycentric weights avoid overflow at large n
    let mut logw = vec![0.0; n];
    let mut sgn = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                let d = x[j] - x[k];
                logw[j] -= d.abs().ln();
                if d < 0.0 {
                    sgn[j] = -sgn[j];
                }
            }
        }
    }
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if i != j {
                let v = sgn[j] * sgn[i] * (logw[j] - logw[i]).exp() / (x[i] - x[j]);
                d[(i, j)] = v;
                s += v;
            }
        }
        d[(i, i)] = -s;
    }
    d
}

/// Vector-valued samples on a grid, node-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledMap {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SampledMap {
    pub fn new(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len() % dim, 0);
        SampledMap { dim, data }
    }

    pub fn scalar(data: Vec<f64>) -> Self {
        SampledMap { dim: 1, data }
    }

    pub fn from_vec3(v: &[Vec3]) -> Self {
        SampledMap {
            dim: 3,
            data: v.iter().flat_map(|x| [x[0], x[1], x[2]]).collect(),
        }
    }

    pub fn from_vec4(v: &[Vec4]) -> Self {
        SampledMap {
            dim: 4,
            data: v.iter().flat_map(|x| [x[0], x[1], x[2], x[3]]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vec3(&self, i: usize) -> Vec3 {
        let s = self.node(i);
        Vec3::new(s[0], s[1], s[2])
    }

    pub fn vec4(&self, i: usize) -> Vec4 {
        let s = self.node(i);
        Vec4::new(s[0], s[1], s[2], s[3])
    }

    pub fn to_vec3(&self) -> Vec<Vec3> {
        (0..self.len()).map(|i| self.vec3(i)).collect()
    }

    pub fn to_vec4(&self) -> Vec<Vec4> {
        (0..self.len()).map(|i| self.vec4(i)).collect()
    }
}

/// Product grid of any number of axes; node index is row-major in axis order.
#[derive(Clone, Debug)]
pub struct ProductGrid {
    pub axes: Vec<Axis>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    weights: Vec<f64>,
}

impl ProductGrid {
    pub fn new(axes: Vec<Axis>) -> Self {
        let shape: Vec<usize> = axes.iter().map(|a| a.len()).collect();
        let mut strides = vec![1; shape.len()];
        for k in (0..shape.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * shape[k + 1];
        }
        let total: usize = shape.iter().product();
        let weights = (0..total)
            .map(|idx| {
                let mut w = 1.0;
                for (k, ax) in axes.iter().enumerate() {
                    w *= ax.weights[(idx / strides[k]) % shape[k]];
                }
                w
            })
            .collect();
        ProductGrid {
            axes,
            shape,
            strides,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        (0..self.shape.len())
            .map(|k| (idx / self.strides[k]) % self.shape[k])
            .collect()
    }

    pub fn coord(&self, idx: usize, axis: usize) -> f64 {
        self.axes[axis].nodes[(idx / self.strides[axis]) % self.shape[axis]]
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        (0..self.axes.len()).map(|k| self.coord(idx, k)).collect()
    }

    /// Parameter-space quadrature weight of a node.
    pub fn weight(&self, idx: usize) -> f64 {
        self.weights[idx]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn min_axis_len(&self) -> usize {
        self.shape.iter().copied().min().unwrap_or(0)
    }

    pub fn differentiate(&self, f: &SampledMap, axis: usize) -> Result<SampledMap> {
        self.apply_diff(f, axis, false)
    }

    /// Applies the transpose of the axis differentiation matrix.
    pub fn differentiate_transpose(&self, f: &SampledMap, axis: usize) -> Result<SampledMap> {
        self.apply_diff(f, axis, true)
    }

    fn apply_diff(&self, f: &SampledMap, axis: usize, transpose: bool) -> Result<SampledMap> {
        assert_eq!(f.len(), self.len(), "sample count does not match grid");
        let n = self.shape[axis];
        if n < MIN_AXIS_NODES {
            return Err(LabError::GridTooCoarse(format!(
                "axis {axis} has {n} nodes, need {MIN_AXIS_NODES}"
            )));
        }
        let d = self.axes[axis].diff_matrix();
        let stride = self.strides[axis];
        let dim = f.dim;
        let mut out = vec![0.0; f.data.len()];
        out.par_chunks_mut(dim).enumerate().for_each(|(idx, o)| {
            let i = (idx / stride) % n;
            let base = idx - i * stride;
            for k in 0..n {
                let c = if transpose { d[(k, i)] } else { d[(i, k)] };
                if c != 0.0 {
                    let src = &f.data[(base + k * stride) * dim..(base + k * stride + 1) * dim];
                    for (oc, s) in o.iter_mut().zip(src) {
                        *oc += c * s;
                    }
                }
            }
        });
        Ok(SampledMap::new(dim, out))
    }

    /// Σ wᵢ fᵢ over parameter weights, fixed summation order.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.len());
        deterministic_sum(
            &f.iter()
                .zip(&self.weights)
                .map(|(a, w)| a * w)
                .collect::<Vec<_>>(),
        )
    }
}

/// Chunked sum whose result does not depend on the thread count.
pub fn deterministic_sum(v: &[f64]) -> f64 {
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = v.par_chunks(CHUNK).map(|c| c.iter().sum()).collect();
    partial.iter().sum()
}

/// Two-parameter chart grid.
pub type ParamGrid2 = ProductGrid;

/// Three-parameter grid; see [`S3Grid`] for the three-sphere chart.
pub type ParamGrid3 = ProductGrid;

/// Adaptive Gauss–Legendre quadrature of f on [a, b]: panels are bisected until a
/// 10-point rule and its two halves agree within tol (scaled by panel length).
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let (x, w) = gauss_legendre(10);
    let rule = |lo: f64, hi: f64| {
        let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        x.iter().zip(&w).map(|(x, w)| w * r * f(m + r * x)).sum::<f64>()
    };
    let mut total = 0.0;
    let mut stack = vec![(a, b, rule(a, b), 0usize)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (l, r) = (rule(lo, mid), rule(mid, hi));
        if (l + r - whole).abs() <= tol * (hi - lo) / (b - a) || depth >= 48 {
            total += l + r;
        } else {
            stack.push((mid, hi, r, depth + 1));
            stack.push((lo, mid, l, depth + 1));
        }
    }
    total
}

/// Chart of S³: z = (sin χ sin θ cos φ, sin χ sin θ sin φ, sin χ cos θ, −cos χ),
/// χ, θ on Gauss–Legendre interior nodes of (0, π), φ periodic.
/// The sign of z₄ makes (χ, θ, φ) positively oriented for the outward normal.
#[derive(Clone, Debug)]
pub struct S3Grid {
    pub grid: ProductGrid,
    points: Vec<Vec4>,
    dvol: Vec<f64>,
}

impl S3Grid {
    pub fn new(n_chi: usize, n_theta: usize, n_phi: usize) -> Self {
        let grid = ProductGrid::new(vec![
            Axis::legendre(n_chi, 0.0, PI),
            Axis::legendre(n_theta, 0.0, PI),
            Axis::periodic(n_phi, 2.0 * PI),
        ]);
        let points = (0..grid.len())
            .map(|i| {
                let (c, t, p) = (grid.coord(i, 0), grid.coord(i, 1), grid.coord(i, 2));
                s3_point(c, t, p)
            })
            .collect();
        let dvol = (0..grid.len())
            .map(|i| {
                let (c, t) = (grid.coord(i, 0), grid.coord(i, 1));
                grid.weight(i) * c.sin().powi(2) * t.sin()
            })
            .collect();
        S3Grid { grid, points, dvol }
    }

    /// n nodes on χ and θ, 2n on φ.
    pub fn uniform(n: usize) -> Self {
        Self::new(n, n, 2 * n)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Vec4 {
        self.points[i]
    }

    pub fn points(&self) -> &[Vec4] {
        &self.points
    }

    /// Quadrature weight times the round volume density.
    pub fn dvol(&self, i: usize) -> f64 {
        self.dvol[i]
    }

    pub fn min_axis_len(&self) -> usize {
        self.grid.min_axis_len()
    }

    /// ∫_{S³} f dvol.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.len());
        deterministic_sum(
            &f.iter()
                .zip(&self.dvol)
                .map(|(a, w)| a * w)
                .collect::<Vec<_>>(),
        )
    }

    /// Coordinate partial derivatives of the embedding at node i.
    pub fn chart_tangents(&self, i: usize) -> [Vec4; 3] {
        let (c, t, p) = (
            self.grid.coord(i, 0),
            self.grid.coord(i, 1),
            self.grid.coord(i, 2),
        );
        let (sc, cc, st, ct, sp, cp) = (c.sin(), c.cos(), t.sin(), t.cos(), p.sin(), p.cos());
        [
            Vec4::new(cc * st * cp, cc * st * sp, cc * ct, sc),
            Vec4::new(sc * ct * cp, sc * ct * sp, -sc * st, 0.0),
            Vec4::new(-sc * st * sp, sc * st * cp, 0.0, 0.0),
        ]
    }
}

pub fn s3_point(chi: f64, theta: f64, phi: f64) -> Vec4 {
    let (sc, st) = (chi.sin(), theta.sin());
    Vec4::new(
        sc * st * phi.cos(),
        sc * st * phi.sin(),
        sc * theta.cos(),
        -chi.cos(),
    )
}

/// Degree as (raw, rounded, residual).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Degree {
    pub raw: f64,
    pub rounded: i64,
    pub residual: f64,
}

impl Degree {
    pub fn from_raw(raw: f64) -> Self {
        let rounded = raw.round();
        Degree {
            raw,
            rounded: rounded as i64,
            residual: (raw - rounded).abs(),
        }
    }
}

/// (1/4π) ∫ f · (∂₁f × ∂₂f) for a unit-vector field on a closed 2-grid.
pub fn degree_integral(grid: &ParamGrid2, f: &SampledMap) -> Result<Degree> {
    assert_eq!(f.dim, 3);
    let d1 = grid.differentiate(f, 0)?;
    let d2 = grid.differentiate(f, 1)?;
    let dens: Vec<f64> = (0..grid.len())
        .map(|i| f.vec3(i).dot(&d1.vec3(i).cross(&d2.vec3(i))))
        .collect();
    Ok(Degree::from_raw(grid.integrate(&dens) / (4.0 * PI)))
}

/// (1/π²) ∫ det(n, ∂₁n, ∂₂n, ∂₃n), the degree into RP³ = SO(3) of a lift to S³.
pub fn degree_via_lift(grid: &ParamGrid3, n: &SampledMap) -> Result<Degree> {
    assert_eq!(n.dim, 4);
    let d: Vec<SampledMap> = (0..3)
        .map(|k| grid.differentiate(n, k))
        .collect::<Result<_>>()?;
    let dens: Vec<f64> = (0..grid.len())
        .map(|i| det4(&n.vec4(i), &d[0].vec4(i), &d[1].vec4(i), &d[2].vec4(i)))
        .collect();
    Ok(Degree::from_raw(grid.integrate(&dens) / (PI * PI)))
}

/// The ∂B⁴ lift g ↦ g sampled on an S³ chart grid.
pub fn boundary_lift(s3: &S3Grid) -> SampledMap {
    SampledMap::from_vec4(s3.points())
}
