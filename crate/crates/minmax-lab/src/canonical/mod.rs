//! Moebius canonical family of an immersion: transformed surfaces, the A/B/C fields,
//! Gauss volume, scans over the ball, bubbles, necks and polarization lifts.

mod bubble;
mod lift;

pub use bubble::{
    bubble_angle, bubble_coords, bubble_limit, neck_decomposition, rescaled_gauss, BubbleCoords, NeckAreas,
};
pub use lift::{s1_sigma_lift, PolarizationDegree};

use crate::algebra::{grass_point_unchecked, GrassPoint, Vec4};
use crate::error::{LabError, Result};
use crate::grid::{SampledMap, S3Grid};
use crate::surface::{DiscreteImmersion, SurfaceGeometry, MINIMAL_TOL};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Closest |a| may get to the sphere.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Point a of the open unit ball; g = −2a/(1+|a|²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MobiusParam {
    pub a: Vec4,
}

impl MobiusParam {
    pub fn new(a: Vec4) -> Result<Self> {
        let r = a.norm();
        if r >= 1.0 - BOUNDARY_TOL {
            return Err(LabError::BoundaryParameter(r));
        }
        Ok(MobiusParam { a })
    }

    pub fn zero() -> Self {
        MobiusParam { a: Vec4::zeros() }
    }

    pub fn g(&self) -> Vec4 {
        -2.0 * self.a / (1.0 + self.a.norm_squared())
    }

    /// Inverse of a ↦ g: a = −g/(1+√(1−|g|²)).
    pub fn from_g(g: Vec4) -> Result<Self> {
        let r = g.norm();
        if r >= 1.0 {
            return Err(LabError::BoundaryParameter(r));
        }
        Self::new(-g / (1.0 + (1.0 - r * r).sqrt()))
    }
}

/// Ψ_a(z) = (1−|a|²)(z−a)/|z−a|² − a with conformal factor (1−|a|²)/|z−a|².
pub fn mobius(a: &MobiusParam, z: &Vec4) -> Result<(Vec4, f64)> {
    let d = z - a.a;
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(LabError::BadParameter("z = a".into()));
    }
    let s = 1.0 - a.a.norm_squared();
    Ok((d * (s / r2) - a.a, s / r2))
}

/// Ψ_a∘Φ sampled on the same grid, with its normal n − (g·n)(Φ−a)/(1+g·Φ).
pub fn transform(
    imm: &DiscreteImmersion,
    geo: &SurfaceGeometry,
    a: &MobiusParam,
) -> Result<(DiscreteImmersion, SampledMap)> {
    let g = a.g();
    let mut pts = Vec::with_capacity(imm.len());
    let mut ns = Vec::with_capacity(imm.len());
    for i in 0..imm.len() {
        let phi = imm.phi.vec4(i);
        let n = geo.normal[i];
        pts.push(mobius(a, &phi)?.0);
        ns.push(transformed_normal(&g, &a.a, &phi, &n));
    }
    let mut out = DiscreteImmersion::from_samples(
        imm.grid.clone(),
        SampledMap::from_vec4(&pts),
        imm.genus,
    );
    out.orientation = imm.orientation;
    Ok((out, SampledMap::from_vec4(&ns)))
}

pub fn transformed_normal(g: &Vec4, a: &Vec4, phi: &Vec4, n: &Vec4) -> Vec4 {
    n - (phi - a) * (g.dot(n) / (1.0 + g.dot(phi)))
}

/// Field values at one point of a minimal surface with principal curvatures ±κ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CanonicalPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// e^μ, conformal factor of Ψ_a at Φ.
    pub e_mu: f64,
    /// dvol_𝔊g / dvol_Φ.
    pub gauss_ratio: f64,
    /// (G⁺_g)*ω / dvol_Φ.
    pub plus_ratio: f64,
}

pub fn canonical_point(g: &Vec4, phi: &Vec4, n: &Vec4, kappa: f64) -> CanonicalPoint {
    let sq = (1.0 - g.norm_squared()).sqrt();
    let gp = 1.0 + g.dot(phi);
    let a = -g.dot(n) / sq;
    let b = kappa * gp / sq;
    let e_mu = sq / gp;
    let root = ((1.0 + (a - b).powi(2)) * (1.0 + (a + b).powi(2))).sqrt();
    let e2mu = e_mu * e_mu;
    CanonicalPoint {
        a,
        b,
        c: (1.0 + a * a - b * b) / (2.0 * root),
        e_mu,
        gauss_ratio: 2.0 * root * e2mu,
        plus_ratio: (1.0 + a * a - b * b) * e2mu,
    }
}

/// Per-node fields of the family member Ψ_a∘Φ.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalFields {
    pub a_field: Vec<f64>,
    pub b_field: Vec<f64>,
    pub c_field: Vec<f64>,
    pub mu: Vec<f64>,
    /// Parameter density of dvol_𝔊g.
    pub gauss_density: Vec<f64>,
    /// Parameter density of (G⁺_g)*ω.
    pub plus_density: Vec<f64>,
}

impl CanonicalFields {
    pub fn min_4c2(&self) -> f64 {
        self.c_field.iter().map(|c| 4.0 * c * c).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_c(&self) -> f64 {
        self.c_field.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Node data a family member needs: Φ, n, κ, quadrature weight × √det g.
#[derive(Clone, Debug)]
pub struct MinimalSamples {
    pub phi: Vec<Vec4>,
    pub normal: Vec<Vec4>,
    pub kappa: Vec<f64>,
    pub area_weight: Vec<f64>,
}

impl MinimalSamples {
    pub fn new(imm: &DiscreteImmersion, geo: &SurfaceGeometry) -> Result<Self> {
        let h = geo.sup_mean_curvature();
        if h >= MINIMAL_TOL {
            return Err(LabError::NotMinimal(h));
        }
        Ok(MinimalSamples {
            phi: imm.phi.to_vec4(),
            normal: geo.normal.clone(),
            kappa: geo
                .principal
                .iter()
                .map(|[k1, k2]| 0.5 * (k1 - k2).abs())
                .collect(),
            area_weight: (0..imm.len())
                .map(|i| imm.grid.weight(i) * geo.area_density[i])
                .collect(),
        })
    }

    pub fn area(&self) -> f64 {
        self.area_weight.iter().sum()
    }

    /// Area(𝔊_g), degree integral, min 4C², max |C|.
    pub fn member(&self, g: &Vec4) -> FamilyValue {
        let mut area = 0.0;
        let mut plus = 0.0;
        let mut min4 = f64::INFINITY;
        let mut maxc: f64 = 0.0;
        for i in 0..self.phi.len() {
            let p = canonical_point(g, &self.phi[i], &self.normal[i], self.kappa[i]);
            area += p.gauss_ratio * self.area_weight[i];
            plus += p.plus_ratio * self.area_weight[i];
            min4 = min4.min(4.0 * p.c * p.c);
            maxc = maxc.max(p.c.abs());
        }
        FamilyValue {
            area_gauss: area,
            degree: plus / (4.0 * PI),
            min_4c2: min4,
            max_abs_c: maxc,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FamilyValue {
    pub area_gauss: f64,
    pub degree: f64,
    pub min_4c2: f64,
    pub max_abs_c: f64,
}

impl FamilyValue {
    pub fn a_functional(&self) -> f64 {
        self.area_gauss + 8.0 * PI * self.degree.round()
    }
}

pub fn fields(
    imm: &DiscreteImmersion,
    geo: &SurfaceGeometry,
    a: &MobiusParam,
) -> Result<CanonicalFields> {
    let s = MinimalSamples::new(imm, geo)?;
    let g = a.g();
    let n = imm.len();
    let mut out = CanonicalFields {
        a_field: Vec::with_capacity(n),
        b_field: Vec::with_capacity(n),
        c_field: Vec::with_capacity(n),
        mu: Vec::with_capacity(n),
        gauss_density: Vec::with_capacity(n),
        plus_density: Vec::with_capacity(n),
    };
    for i in 0..n {
        let p = canonical_point(&g, &s.phi[i], &s.normal[i], s.kappa[i]);
        out.a_field.push(p.a);
        out.b_field.push(p.b);
        out.c_field.push(p.c);
        out.mu.push(p.e_mu.ln());
        out.gauss_density.push(p.gauss_ratio * geo.area_density[i]);
        out.plus_density.push(p.plus_ratio * geo.area_density[i]);
    }
    Ok(out)
}

/// Gauss map of Ψ_a∘Φ evaluated from the transformed frame.
pub fn transformed_gauss_point(a: &MobiusParam, phi: &Vec4, n: &Vec4) -> Result<GrassPoint> {
    let (img, _) = mobius(a, phi)?;
    let ng = transformed_normal(&a.g(), &a.a, phi, n);
    Ok(grass_point_unchecked(&img, &ng))
}

/// a = ρω with ρ on Gauss–Legendre nodes of (0, 0.9], ω on the nodes of a coarse S³ grid, plus a = 0.
pub fn polar_a_grid(n_rho: usize, directions: &S3Grid, rho_max: f64) -> Vec<Vec4> {
    let (rho, _) = crate::grid::gauss_legendre_on(n_rho, 0.0, rho_max);
    let mut out = vec![Vec4::zeros()];
    for r in &rho {
        for w in directions.points() {
            out.push(w * *r);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub a: [f64; 4],
    pub g_norm: f64,
    pub area_gauss: f64,
    pub degree: f64,
    pub a_functional: f64,
    pub min_4c2: f64,
    pub max_abs_c: f64,
    pub neck_area: Option<f64>,
}

/// A(𝔊_{Ψ_a∘Φ}) over a list of parameters; parallel over a, deterministic per row.
pub fn family_scan(
    imm: &DiscreteImmersion,
    geo: &SurfaceGeometry,
    a_grid: &[Vec4],
) -> Result<Vec<ScanRow>> {
    let s = MinimalSamples::new(imm, geo)?;
    a_grid
        .par_iter()
        .map(|a| {
            let m = MobiusParam::new(*a)?;
            let g = m.g();
            let v = s.member(&g);
            Ok(ScanRow {
                a: [a[0], a[1], a[2], a[3]],
                g_norm: g.norm(),
                area_gauss: v.area_gauss,
                degree: v.degree,
                a_functional: v.a_functional(),
                min_4c2: v.min_4c2,
                max_abs_c: v.max_abs_c,
                neck_area: None,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub count: usize,
    pub max: f64,
    pub argmax: [f64; 4],
    pub min: f64,
    pub max_abs_c: f64,
}

pub fn summarize(rows: &[ScanRow]) -> ScanSummary {
    let mut best = &rows[0];
    let mut min = f64::INFINITY;
    let mut maxc: f64 = 0.0;
    for r in rows {
        if r.a_functional > best.a_functional {
            best = r;
        }
        min = min.min(r.a_functional);
        maxc = maxc.max(r.max_abs_c);
    }
    ScanSummary {
        count: rows.len(),
        max: best.a_functional,
        argmax: best.a,
        min,
        max_abs_c: maxc,
    }
}
