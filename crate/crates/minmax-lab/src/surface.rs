//! Immersions of closed surfaces into S³, their curvature, Gauss maps and the A-functional.

use crate::algebra::{cross4, grass_point_unchecked, GrassPoint, Vec3, Vec4};
use crate::error::{LabError, Result};
use crate::grid::{degree_integral, Axis, Degree, ParamGrid2, ProductGrid, SampledMap};
use nalgebra::Matrix2;
use serde::Serialize;
use std::f64::consts::PI;

/// sup |H| below which an immersion counts as minimal.
pub const MINIMAL_TOL: f64 = 1e-6;
/// Degree residual above which the A-functional refuses to round.
pub const DEGREE_ROUND_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SurfaceKind {
    /// S³ ∩ {x_axis = 0}.
    GeodesicSphere { axis: usize },
    /// (r cos u, r sin u, s cos v, s sin v), s = √(1 − r²).
    FlatTorus { r: f64 },
    Clifford,
}

impl SurfaceKind {
    pub fn genus(&self) -> u8 {
        match self {
            SurfaceKind::GeodesicSphere { .. } => 0,
            _ => 1,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "clifford" => Ok(SurfaceKind::Clifford),
            "sphere" | "geodesic_sphere" => Ok(SurfaceKind::GeodesicSphere { axis: 3 }),
            _ => {
                if let Some(r) = s.strip_prefix("flat_torus:") {
                    let r: f64 = r
                        .parse()
                        .map_err(|_| LabError::Config(format!("bad torus radius in {s}")))?;
                    Ok(SurfaceKind::FlatTorus { r })
                } else {
                    Err(LabError::Config(format!("unknown surface {s}")))
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            SurfaceKind::FlatTorus { r } if !(r > 0.0 && r < 1.0) => {
                Err(LabError::BadParameter(format!("torus radius {r} not in (0,1)")))
            }
            SurfaceKind::GeodesicSphere { axis } if axis > 3 => {
                Err(LabError::BadParameter(format!("sphere axis {axis} > 3")))
            }
            _ => Ok(()),
        }
    }

    fn torus_radius(&self) -> Option<f64> {
        match *self {
            SurfaceKind::FlatTorus { r } => Some(r),
            SurfaceKind::Clifford => Some(std::f64::consts::FRAC_1_SQRT_2),
            _ => None,
        }
    }

    /// Chart grid at resolution n (n × n nodes).
    pub fn grid(&self, n: usize) -> ParamGrid2 {
        match self {
            SurfaceKind::GeodesicSphere { .. } => ProductGrid::new(vec![
                Axis::legendre(n, 0.0, PI),
                Axis::periodic(n, 2.0 * PI),
            ]),
            _ => ProductGrid::new(vec![
                Axis::periodic(n, 2.0 * PI),
                Axis::periodic(n, 2.0 * PI),
            ]),
        }
    }

    /// Whether chart coordinate `axis` is periodic, and its period or interval.
    pub fn chart_domain(&self, axis: usize) -> (bool, f64, f64) {
        match (self, axis) {
            (SurfaceKind::GeodesicSphere { .. }, 0) => (false, 0.0, PI),
            _ => (true, 0.0, 2.0 * PI),
        }
    }

    /// Closed-form Φ and its first and second chart derivatives at (x1, x2).
    pub fn eval(&self, x1: f64, x2: f64) -> ChartJet {
        match *self {
            SurfaceKind::GeodesicSphere { axis } => {
                let e: Vec<Vec4> = (0..4)
                    .filter(|&k| k != axis)
                    .map(|k| {
                        let mut v = Vec4::zeros();
                        v[k] = 1.0;
                        v
                    })
                    .collect();
                let (st, ct, sp, cp) = (x1.sin(), x1.cos(), x2.sin(), x2.cos());
                let rad = e[1] * cp + e[2] * sp;
                let drad = -e[1] * sp + e[2] * cp;
                ChartJet {
                    phi: e[0] * ct + rad * st,
                    d1: -e[0] * st + rad * ct,
                    d2: drad * st,
                    d11: -e[0] * ct - rad * st,
                    d12: drad * ct,
                    d22: -rad * st,
                }
            }
            _ => {
                let r = self.torus_radius().unwrap();
                let s = (1.0 - r * r).sqrt();
                let (su, cu, sv, cv) = (x1.sin(), x1.cos(), x2.sin(), x2.cos());
                ChartJet {
                    phi: Vec4::new(r * cu, r * su, s * cv, s * sv),
                    d1: Vec4::new(-r * su, r * cu, 0.0, 0.0),
                    d2: Vec4::new(0.0, 0.0, -s * sv, s * cv),
                    d11: Vec4::new(-r * cu, -r * su, 0.0, 0.0),
                    d12: Vec4::zeros(),
                    d22: Vec4::new(0.0, 0.0, -s * cv, -s * sv),
                }
            }
        }
    }
}

/// Φ with first and second chart derivatives at one point.
#[derive(Clone, Copy, Debug)]
pub struct ChartJet {
    pub phi: Vec4,
    pub d1: Vec4,
    pub d2: Vec4,
    pub d11: Vec4,
    pub d12: Vec4,
    pub d22: Vec4,
}

/// Pointwise frame data derived from a jet.
#[derive(Clone, Copy, Debug)]
pub struct PointFrame {
    pub phi: Vec4,
    pub n: Vec4,
    pub d1: Vec4,
    pub d2: Vec4,
    /// (E, F, G)
    pub metric: [f64; 3],
    pub h: f64,
    pub k_ext: f64,
    pub principal: [f64; 2],
}

impl PointFrame {
    pub fn sqrt_det(&self) -> f64 {
        let [e, f, g] = self.metric;
        (e * g - f * f).sqrt()
    }

    /// Orthonormal tangent frame from Gram–Schmidt on (∂₁Φ, ∂₂Φ).
    pub fn tangent_frame(&self) -> (Vec4, Vec4) {
        let e1 = self.d1.normalize();
        let e2 = (self.d2 - e1 * e1.dot(&self.d2)).normalize();
        (e1, e2)
    }
}

/// Unit normal with det(Φ, n, ∂₁Φ, ∂₂Φ) = +√det g, times the orientation sign.
pub fn unit_normal(phi: &Vec4, d1: &Vec4, d2: &Vec4, orientation: f64) -> Vec4 {
    cross4(phi, d1, d2).normalize() * orientation
}

/// Second fundamental form data from metric (E, F, G) and h_ij.
fn curvature_from_forms(metric: [f64; 3], h: [f64; 3]) -> (f64, f64, [f64; 2]) {
    let g = Matrix2::new(metric[0], metric[1], metric[1], metric[2]);
    let hm = Matrix2::new(h[0], h[1], h[1], h[2]);
    let s = g.try_inverse().unwrap_or_else(Matrix2::zeros) * hm;
    let mean = 0.5 * s.trace();
    let k_ext = s.determinant();
    let disc = (mean * mean - k_ext).max(0.0).sqrt();
    (mean, k_ext, [mean + disc, mean - disc])
}

pub fn frame_from_jet(jet: &ChartJet, orientation: f64) -> PointFrame {
    let n = unit_normal(&jet.phi, &jet.d1, &jet.d2, orientation);
    let metric = [
        jet.d1.dot(&jet.d1),
        jet.d1.dot(&jet.d2),
        jet.d2.dot(&jet.d2),
    ];
    let h = [jet.d11.dot(&n), jet.d12.dot(&n), jet.d22.dot(&n)];
    let (mean, k_ext, principal) = curvature_from_forms(metric, h);
    PointFrame {
        phi: jet.phi,
        n,
        d1: jet.d1,
        d2: jet.d2,
        metric,
        h: mean,
        k_ext,
        principal,
    }
}

/// Sampled immersion Σ → S³.
#[derive(Clone, Debug)]
pub struct DiscreteImmersion {
    pub grid: ParamGrid2,
    pub phi: SampledMap,
    pub genus: u8,
    /// +1 or −1; multiplies the normal.
    pub orientation: f64,
    /// Closed-form source, when the samples come from a built-in chart.
    pub kind: Option<SurfaceKind>,
}

pub fn builtin_surface(kind: SurfaceKind, n: usize) -> Result<DiscreteImmersion> {
    kind.validate()?;
    let grid = kind.grid(n);
    let pts: Vec<Vec4> = (0..grid.len())
        .map(|i| kind.eval(grid.coord(i, 0), grid.coord(i, 1)).phi)
        .collect();
    Ok(DiscreteImmersion {
        grid,
        phi: SampledMap::from_vec4(&pts),
        genus: kind.genus(),
        orientation: 1.0,
        kind: Some(kind),
    })
}

impl DiscreteImmersion {
    pub fn from_samples(grid: ParamGrid2, phi: SampledMap, genus: u8) -> Self {
        DiscreteImmersion {
            grid,
            phi,
            genus,
            orientation: 1.0,
            kind: None,
        }
    }

    pub fn reversed(&self) -> Self {
        let mut r = self.clone();
        r.orientation = -r.orientation;
        r
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn max_norm_defect(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.phi.vec4(i).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-node first and second order data of an immersion.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceGeometry {
    #[serde(skip)]
    pub d1: Vec<Vec4>,
    #[serde(skip)]
    pub d2: Vec<Vec4>,
    /// (E, F, G) per node.
    pub metric: Vec<[f64; 3]>,
    /// e^{2λ} when the chart is conformal at every node.
    pub conformal_factor: Option<Vec<f64>>,
    #[serde(skip)]
    pub normal: Vec<Vec4>,
    pub mean_curvature: Vec<f64>,
    pub k_ext: Vec<f64>,
    pub k_int: Vec<f64>,
    pub a0_sq: Vec<f64>,
    pub principal: Vec<[f64; 2]>,
    /// √det g, parameter density of dvol.
    pub area_density: Vec<f64>,
}

impl SurfaceGeometry {
    pub fn sup_mean_curvature(&self) -> f64 {
        self.mean_curvature.iter().fold(0.0, |m, h| m.max(h.abs()))
    }

    /// sup |n·Φ|, |n·∂ᵢΦ|.
    pub fn normal_residual(&self, imm: &DiscreteImmersion) -> f64 {
        (0..imm.len())
            .map(|i| {
                let n = self.normal[i];
                n.dot(&imm.phi.vec4(i))
                    .abs()
                    .max(n.dot(&self.d1[i]).abs())
                    .max(n.dot(&self.d2[i]).abs())
                    .max((n.norm() - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn normal_map(&self) -> SampledMap {
        SampledMap::from_vec4(&self.normal)
    }
}

fn diff_vec4(grid: &ParamGrid2, f: &SampledMap, axis: usize) -> Result<Vec<Vec4>> {
    Ok(grid.differentiate(f, axis)?.to_vec4())
}

fn diff_scalar(grid: &ParamGrid2, f: &[f64], axis: usize) -> Result<Vec<f64>> {
    Ok(grid.differentiate(&SampledMap::scalar(f.to_vec()), axis)?.data)
}

/// Curvature data by spectral differentiation of the samples.
pub fn geometry(imm: &DiscreteImmersion) -> Result<SurfaceGeometry> {
    let grid = &imm.grid;
    let n_nodes = imm.len();
    let d1m = grid.differentiate(&imm.phi, 0)?;
    let d2m = grid.differentiate(&imm.phi, 1)?;
    let d11 = diff_vec4(grid, &d1m, 0)?;
    let d12 = diff_vec4(grid, &d1m, 1)?;
    let d22 = diff_vec4(grid, &d2m, 1)?;
    let d1 = d1m.to_vec4();
    let d2 = d2m.to_vec4();

    let mut metric = Vec::with_capacity(n_nodes);
    let mut normal = Vec::with_capacity(n_nodes);
    let mut mean = Vec::with_capacity(n_nodes);
    let mut k_ext = Vec::with_capacity(n_nodes);
    let mut principal = Vec::with_capacity(n_nodes);
    let mut area_density = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let jet = ChartJet {
            phi: imm.phi.vec4(i),
            d1: d1[i],
            d2: d2[i],
            d11: d11[i],
            d12: d12[i],
            d22: d22[i],
        };
        let [e, f, g] = [jet.d1.dot(&jet.d1), jet.d1.dot(&jet.d2), jet.d2.dot(&jet.d2)];
        let det = e * g - f * f;
        if det < 1e-12 {
            return Err(LabError::DegenerateMetric { node: i, det });
        }
        let fr = frame_from_jet(&jet, imm.orientation);
        metric.push(fr.metric);
        normal.push(fr.n);
        mean.push(fr.h);
        k_ext.push(fr.k_ext);
        principal.push(fr.principal);
        area_density.push(det.sqrt());
    }

    let k_int = brioschi(grid, &metric)?;
    let a0_sq = principal
        .iter()
        .map(|[k1, k2]| 0.5 * (k1 - k2) * (k1 - k2))
        .collect();
    let conformal = metric.iter().all(|[e, f, g]| {
        let s = e.abs().max(g.abs());
        (e - g).abs() <= 1e-10 * s && f.abs() <= 1e-10 * s
    });
    let conformal_factor = conformal.then(|| metric.iter().map(|m| m[0]).collect());
    Ok(SurfaceGeometry {
        d1,
        d2,
        metric,
        conformal_factor,
        normal,
        mean_curvature: mean,
        k_ext,
        k_int,
        a0_sq,
        principal,
        area_density,
    })
}

/// Intrinsic curvature from the first fundamental form alone.
fn brioschi(grid: &ParamGrid2, metric: &[[f64; 3]]) -> Result<Vec<f64>> {
    let e: Vec<f64> = metric.iter().map(|m| m[0]).collect();
    let f: Vec<f64> = metric.iter().map(|m| m[1]).collect();
    let g: Vec<f64> = metric.iter().map(|m| m[2]).collect();
    let orthogonal = metric
        .iter()
        .all(|[e, f, g]| f.abs() <= 1e-12 * e.abs().max(g.abs()));
    if orthogonal {
        // K = −(1/2√(EG)) [(E_v/√(EG))_v + (G_u/√(EG))_u]
        let r: Vec<f64> = e.iter().zip(&g).map(|(a, b)| (a * b).sqrt()).collect();
        let ev = diff_scalar(grid, &e, 1)?;
        let gu = diff_scalar(grid, &g, 0)?;
        let p: Vec<f64> = ev.iter().zip(&r).map(|(a, b)| a / b).collect();
        let q: Vec<f64> = gu.iter().zip(&r).map(|(a, b)| a / b).collect();
        let pv = diff_scalar(grid, &p, 1)?;
        let qu = diff_scalar(grid, &q, 0)?;
        return Ok((0..metric.len())
            .map(|i| -(pv[i] + qu[i]) / (2.0 * r[i]))
            .collect());
    }
    let (e_u, e_v) = (diff_scalar(grid, &e, 0)?, diff_scalar(grid, &e, 1)?);
    let (f_u, f_v) = (diff_scalar(grid, &f, 0)?, diff_scalar(grid, &f, 1)?);
    let (g_u, g_v) = (diff_scalar(grid, &g, 0)?, diff_scalar(grid, &g, 1)?);
    let e_vv = diff_scalar(grid, &e_v, 1)?;
    let f_uv = diff_scalar(grid, &f_u, 1)?;
    let g_uu = diff_scalar(grid, &g_u, 0)?;
    Ok((0..metric.len())
        .map(|i| {
            let (ee, ff, gg) = (e[i], f[i], g[i]);
            let m1 = nalgebra::Matrix3::new(
                -0.5 * e_vv[i] + f_uv[i] - 0.5 * g_uu[i],
                0.5 * e_u[i],
                f_u[i] - 0.5 * e_v[i],
                f_v[i] - 0.5 * g_u[i],
                ee,
                ff,
                0.5 * g_v[i],
                ff,
                gg,
            );
            let m2 = nalgebra::Matrix3::new(
                0.0,
                0.5 * e_v[i],
                0.5 * g_u[i],
                0.5 * e_v[i],
                ee,
                ff,
                0.5 * g_u[i],
                ff,
                gg,
            );
            let det = ee * gg - ff * ff;
            (m1.determinant() - m2.determinant()) / (det * det)
        })
        .collect())
}

pub fn area(imm: &DiscreteImmersion, geo: &SurfaceGeometry) -> f64 {
    imm.grid.integrate(&geo.area_density)
}

/// ∫ (1 + H²) dvol.
pub fn willmore(imm: &DiscreteImmersion, geo: &SurfaceGeometry) -> f64 {
    let f: Vec<f64> = geo
        .area_density
        .iter()
        .zip(&geo.mean_curvature)
        .map(|(a, h)| a * (1.0 + h * h))
        .collect();
    imm.grid.integrate(&f)
}

/// (1/2π) ∫ K_int dvol.
pub fn gauss_bonnet(imm: &DiscreteImmersion, geo: &SurfaceGeometry) -> f64 {
    let f: Vec<f64> = geo
        .area_density
        .iter()
        .zip(&geo.k_int)
        .map(|(a, k)| a * k)
        .collect();
    imm.grid.integrate(&f) / (2.0 * PI)
}

/// Gauss map 𝔊 = (G⁺, G⁻) sampled on the chart grid.
#[derive(Clone, Debug)]
pub struct GaussMapField {
    pub grid: ParamGrid2,
    pub points: Vec<GrassPoint>,
    pub d1: Vec<[f64; 6]>,
    pub d2: Vec<[f64; 6]>,
    /// Parameter density of dvol_𝔊 = |∂₁𝔊 ∧ ∂₂𝔊|.
    pub density: Vec<f64>,
    pub degree: Degree,
}

fn dot6(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl GaussMapField {
    pub fn from_points(grid: &ParamGrid2, points: Vec<GrassPoint>) -> Result<Self> {
        let flat = SampledMap::new(6, points.iter().flat_map(|p| p.to_array()).collect());
        let to6 = |m: SampledMap| -> Vec<[f64; 6]> {
            (0..m.len())
                .map(|i| m.node(i).try_into().unwrap())
                .collect()
        };
        let d1 = to6(grid.differentiate(&flat, 0)?);
        let d2 = to6(grid.differentiate(&flat, 1)?);
        let density = d1
            .iter()
            .zip(&d2)
            .map(|(a, b)| (dot6(a, a) * dot6(b, b) - dot6(a, b).powi(2)).max(0.0).sqrt())
            .collect();
        let plus: Vec<Vec3> = points.iter().map(|p| p.plus).collect();
        let degree = degree_integral(grid, &SampledMap::from_vec3(&plus))?;
        Ok(GaussMapField {
            grid: grid.clone(),
            points,
            d1,
            d2,
            density,
            degree,
        })
    }

    pub fn area(&self) -> f64 {
        self.grid.integrate(&self.density)
    }

    /// ½ ∫ |∇𝔊|² dx.
    pub fn half_dirichlet(&self) -> f64 {
        let f: Vec<f64> = self
            .d1
            .iter()
            .zip(&self.d2)
            .map(|(a, b)| 0.5 * (dot6(a, a) + dot6(b, b)))
            .collect();
        self.grid.integrate(&f)
    }

    /// (E, F, G) of 𝔊 as a map into R⁶.
    pub fn metric(&self, i: usize) -> [f64; 3] {
        let (a, b) = (&self.d1[i], &self.d2[i]);
        [dot6(a, a), dot6(a, b), dot6(b, b)]
    }

    /// G⁺ pulled back area form density, plus · (∂₁plus × ∂₂plus).
    pub fn plus_jacobian(&self, i: usize) -> f64 {
        let p = self.points[i].plus;
        let a = Vec3::new(self.d1[i][0], self.d1[i][1], self.d1[i][2]);
        let b = Vec3::new(self.d2[i][0], self.d2[i][1], self.d2[i][2]);
        p.dot(&a.cross(&b))
    }

    pub fn max_unit_defect(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.plus.norm() - 1.0).abs().max((p.minus.norm() - 1.0).abs()))
            .fold(0.0, f64::max)
    }
}

pub fn gauss_map(imm: &DiscreteImmersion, geo: &SurfaceGeometry) -> Result<GaussMapField> {
    let points = (0..imm.len())
        .map(|i| grass_point_unchecked(&imm.phi.vec4(i), &geo.normal[i]))
        .collect();
    GaussMapField::from_points(&imm.grid, points)
}

/// sup |∂₁a·∂₂b − ∂₂a·∂₁b| for a sampled pair of maps.
pub fn lagrangian_residual_pair(grid: &ParamGrid2, a: &SampledMap, b: &SampledMap) -> Result<f64> {
    let a1 = grid.differentiate(a, 0)?;
    let a2 = grid.differentiate(a, 1)?;
    let b1 = grid.differentiate(b, 0)?;
    let b2 = grid.differentiate(b, 1)?;
    let dim = a.dim;
    Ok((0..grid.len())
        .map(|i| {
            let s: f64 = (0..dim)
                .map(|c| a1.data[i * dim + c] * b2.data[i * dim + c] - a2.data[i * dim + c] * b1.data[i * dim + c])
                .sum();
            s.abs()
        })
        .fold(0.0, f64::max))
}

/// Residual for the Gauss lift (Φ, n).
pub fn lagrangian_residual(imm: &DiscreteImmersion, geo: &SurfaceGeometry) -> Result<f64> {
    lagrangian_residual_pair(&imm.grid, &imm.phi, &geo.normal_map())
}

/// C = (G⁺)*ω / dvol_𝔊 per node.
pub fn lagrangian_jacobian(gm: &GaussMapField) -> Result<Vec<f64>> {
    (0..gm.points.len())
        .map(|i| {
            let d = gm.density[i];
            if d <= 1e-14 {
                Err(LabError::DegenerateGaussMetric(i))
            } else {
                Ok(gm.plus_jacobian(i) / d)
            }
        })
        .collect()
}

/// ∫ dvol_𝔊 + 8π deg 𝔊 with the rounded degree.
pub fn a_functional(gm: &GaussMapField) -> Result<f64> {
    if gm.degree.residual >= DEGREE_ROUND_TOL {
        return Err(LabError::AmbiguousDegree {
            raw: gm.degree.raw,
            residual: gm.degree.residual,
        });
    }
    Ok(gm.area() + 8.0 * PI * gm.degree.rounded as f64)
}

/// (Area(𝔊), 2 Area(Φ) + 2 Area(n)) for a minimal immersion.
pub fn area_identity_check(imm: &DiscreteImmersion, geo: &SurfaceGeometry) -> Result<(f64, f64)> {
    let h = geo.sup_mean_curvature();
    if h >= MINIMAL_TOL {
        return Err(LabError::NotMinimal(h));
    }
    let gm = gauss_map(imm, geo)?;
    let nm = geo.normal_map();
    let n1 = imm.grid.differentiate(&nm, 0)?.to_vec4();
    let n2 = imm.grid.differentiate(&nm, 1)?.to_vec4();
    let dens: Vec<f64> = n1
        .iter()
        .zip(&n2)
        .map(|(a, b)| (a.norm_squared() * b.norm_squared() - a.dot(b).powi(2)).max(0.0).sqrt())
        .collect();
    let area_n = imm.grid.integrate(&dens);
    Ok((gm.area(), 2.0 * area(imm, geo) + 2.0 * area_n))
}
