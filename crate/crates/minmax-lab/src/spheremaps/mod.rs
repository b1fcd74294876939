//! Maps S³ → S², their Dirichlet energies and Moebius energy profiles.
//!
//! Dirichlet energies use E(u) = ∫|du|² (no ½). Profiles are integrated in
//! pulled-back form, E(u∘Ψ_a) = ∫|du|²(w) (1−|a|²)/|w+a|² dvol(w), which keeps
//! the singular set of π on the chart poles where no node sits.

mod gl;
mod reduced;

pub use gl::{gl_energy, gl_gradient, GLState};
pub use reduced::{monotonicity_certificate, reduced_integral, slice_reduction, MonotonicityReport};

use crate::algebra::{im, pure, quat, vec4, Vec3, Vec4};
use crate::error::{LabError, Result};
use crate::grid::{SampledMap, S3Grid};
use rayon::prelude::*;
use serde::Serialize;

/// Largest |a| or |b| accepted by profiles and families.
pub const MAX_PARAM_NORM: f64 = 0.95;
/// Nodes per axis required before a singular kind is integrated.
pub const SINGULAR_MIN_NODES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    Constant { value: Vec3 },
    /// q ↦ q i q*.
    Hopf,
    /// (x₁, x₂, x₃, x₄) ↦ (x₁, x₂, x₃)/√(1−x₄²).
    PiProjection,
    /// q ↦ −q b q*, b a unit vector.
    Vb { b: Vec3 },
    /// q ↦ Ψ_a(q) π(Ψ_(b,0)(q)) Ψ_a(q)*.
    Conjugation { b: Vec3, a: Vec4 },
    /// inner ∘ Ψ_a.
    Mobius { inner: Box<MapKind>, a: Vec4 },
}

impl MapKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hopf" => Ok(MapKind::Hopf),
            "pi" | "pi_projection" => Ok(MapKind::PiProjection),
            "constant" => Ok(MapKind::Constant { value: Vec3::x() }),
            _ => Err(LabError::Config(format!("unknown map kind {s:?}"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MapKind::Constant { .. } => "constant".into(),
            MapKind::Hopf => "hopf".into(),
            MapKind::PiProjection => "pi".into(),
            MapKind::Vb { .. } => "v_b".into(),
            MapKind::Conjugation { .. } => "conjugation".into(),
            MapKind::Mobius { inner, .. } => format!("{}∘mobius", inner.name()),
        }
    }

    pub fn is_singular(&self) -> bool {
        match self {
            MapKind::PiProjection | MapKind::Conjugation { .. } => true,
            MapKind::Mobius { inner, .. } => inner.is_singular(),
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MapKind::Vb { b } if (b.norm() - 1.0).abs() > 1e-12 => {
                Err(LabError::BadParameter(format!("|b| = {} for v_b", b.norm())))
            }
            MapKind::Conjugation { b, a } => {
                check_ball(b.norm())?;
                check_ball(a.norm())
            }
            MapKind::Mobius { inner, a } => {
                check_ball(a.norm())?;
                match **inner {
                    MapKind::Mobius { .. } | MapKind::Conjugation { .. } => Err(
                        LabError::BadParameter("Moebius composite of a composite".into()),
                    ),
                    _ => inner.validate(),
                }
            }
            _ => Ok(()),
        }
    }

    /// Value at a point of S³.
    pub fn eval(&self, z: &Vec4) -> Vec3 {
        self.jet(z, &Vec4::zeros()).0
    }

    /// Value and derivative along the tangent vector v at z.
    pub fn jet(&self, z: &Vec4, v: &Vec4) -> (Vec3, Vec3) {
        match self {
            MapKind::Constant { value } => (*value, Vec3::zeros()),
            MapKind::Hopf => {
                let (q, dq) = (quat(z), quat(v));
                let i = pure(&Vec3::x());
                (
                    im(&(q * i * q.conjugate())),
                    im(&(dq * i * q.conjugate() + q * i * dq.conjugate())),
                )
            }
            MapKind::PiProjection => pi_jet(z, v),
            MapKind::Vb { b } => {
                let (q, dq) = (quat(z), quat(v));
                let b = pure(b);
                (
                    -im(&(q * b * q.conjugate())),
                    -im(&(dq * b * q.conjugate() + q * b * dq.conjugate())),
                )
            }
            MapKind::Conjugation { b, a } => {
                conj_pi_jet(z, v, &[*a], &[Vec4::new(b[0], b[1], b[2], 0.0)])
            }
            MapKind::Mobius { inner, a } => {
                let (w, dw) = mobius_jet(a, z, v);
                inner.jet(&w, &dw)
            }
        }
    }

    /// |du|²(z) summed over the orthonormal tangent frame z·i, z·j, z·k.
    pub fn density(&self, z: &Vec4) -> f64 {
        tangent_frame(z)
            .iter()
            .map(|e| self.jet(z, e).1.norm_squared())
            .sum()
    }

    /// Integrand of the energy in pulled-back coordinates w (see module docs).
    fn pulled_density(&self, w: &Vec4) -> f64 {
        match self {
            MapKind::Mobius { inner, a } => inner.density(w) * conformal_weight(a, w),
            MapKind::Conjugation { b, a } => {
                let b4 = Vec4::new(b[0], b[1], b[2], 0.0);
                let dens: f64 = tangent_frame(w)
                    .iter()
                    .map(|e| conj_pi_jet(w, e, &[-b4, *a], &[]).1.norm_squared())
                    .sum();
                dens * conformal_weight(&b4, w)
            }
            _ => self.density(w),
        }
    }
}

fn check_ball(r: f64) -> Result<()> {
    if r > MAX_PARAM_NORM {
        return Err(LabError::BadParameter(format!(
            "parameter norm {r} exceeds {MAX_PARAM_NORM}"
        )));
    }
    Ok(())
}

/// z·i, z·j, z·k.
pub fn tangent_frame(z: &Vec4) -> [Vec4; 3] {
    let q = quat(z);
    [Vec3::x(), Vec3::y(), Vec3::z()].map(|e| vec4(&(q * pure(&e))))
}

/// (1−|a|²)/|w+a|², the Jacobian factor of the inverse Moebius map.
pub fn conformal_weight(a: &Vec4, w: &Vec4) -> f64 {
    (1.0 - a.norm_squared()) / (w + a).norm_squared()
}

/// Ψ_a and its derivative along v.
pub fn mobius_jet(a: &Vec4, z: &Vec4, v: &Vec4) -> (Vec4, Vec4) {
    let s = 1.0 - a.norm_squared();
    let d = z - a;
    let r2 = d.norm_squared();
    (
        d * (s / r2) - a,
        (v - d * (2.0 * d.dot(v) / r2)) * (s / r2),
    )
}

fn chain_jet(chain: &[Vec4], z: &Vec4, v: &Vec4) -> (Vec4, Vec4) {
    chain
        .iter()
        .fold((*z, *v), |(z, v), a| mobius_jet(a, &z, &v))
}

fn pi_jet(z: &Vec4, v: &Vec4) -> (Vec3, Vec3) {
    let x = Vec3::new(z[0], z[1], z[2]);
    let dx = Vec3::new(v[0], v[1], v[2]);
    let r2 = 1.0 - z[3] * z[3];
    let r = r2.sqrt();
    (x / r, dx / r + x * (z[3] * v[3] / (r2 * r)))
}

/// c π(p) c* with c = chain_c(z), p = chain_p(z).
fn conj_pi_jet(z: &Vec4, v: &Vec4, chain_c: &[Vec4], chain_p: &[Vec4]) -> (Vec3, Vec3) {
    let (c, dc) = chain_jet(chain_c, z, v);
    let (p, dp) = chain_jet(chain_p, z, v);
    let (y, dy) = pi_jet(&p, &dp);
    let (c, dc, y, dy) = (quat(&c), quat(&dc), pure(&y), pure(&dy));
    (
        im(&(c * y * c.conjugate())),
        im(&(dc * y * c.conjugate() + c * dy * c.conjugate() + c * y * dc.conjugate())),
    )
}

fn guard(m: &MapKind, grid: &S3Grid) -> Result<()> {
    m.validate()?;
    if m.is_singular() && grid.min_axis_len() < SINGULAR_MIN_NODES {
        return Err(LabError::GridTooCoarse(format!(
            "{} needs {SINGULAR_MIN_NODES} nodes per axis, grid has {}",
            m.name(),
            grid.min_axis_len()
        )));
    }
    Ok(())
}

/// Samples of the map on the grid.
pub fn sample(m: &MapKind, grid: &S3Grid) -> SampledMap {
    let v: Vec<Vec3> = grid.points().par_iter().map(|z| m.eval(z)).collect();
    SampledMap::from_vec3(&v)
}

/// |du|² at every node.
pub fn density_field(m: &MapKind, grid: &S3Grid) -> Vec<f64> {
    grid.points().par_iter().map(|z| m.density(z)).collect()
}

/// ∫_{S³}|du|² dvol.
pub fn dirichlet_energy(m: &MapKind, grid: &S3Grid) -> Result<f64> {
    guard(m, grid)?;
    let f: Vec<f64> = grid
        .points()
        .par_iter()
        .map(|w| m.pulled_density(w))
        .collect();
    Ok(grid.integrate(&f))
}

/// Energy integrated at the original points, without the change of variables.
/// Accurate only when the map is smooth on the whole sphere.
pub fn direct_energy(m: &MapKind, grid: &S3Grid) -> Result<f64> {
    m.validate()?;
    Ok(grid.integrate(&density_field(m, grid)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub a: Vec4,
    pub a_norm: f64,
    pub energy: f64,
}

/// E(m∘Ψ_a) for every a.
pub fn mobius_profile(m: &MapKind, a_list: &[Vec4], grid: &S3Grid) -> Result<Vec<ProfileRow>> {
    a_list
        .iter()
        .map(|a| {
            let energy = dirichlet_energy(
                &MapKind::Mobius {
                    inner: Box::new(m.clone()),
                    a: *a,
                },
                grid,
            )?;
            Ok(ProfileRow {
                a: *a,
                a_norm: a.norm(),
                energy,
            })
        })
        .collect()
}

/// Dirichlet energy of q ↦ Ψ_a(q) π(Ψ_(b,0)(q)) Ψ_a(q)*.
pub fn conjugation_family_energy(b: &Vec3, a: &Vec4, grid: &S3Grid) -> Result<f64> {
    dirichlet_energy(&MapKind::Conjugation { b: *b, a: *a }, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> S3Grid {
        S3Grid::uniform(SINGULAR_MIN_NODES)
    }

    /// ∫_{S³} (1−r²)/|w+a|² dvol for a = r e₄ as a 1-D integral in the polar angle.
    fn weight_volume_oracle(r: f64) -> f64 {
        let (x, w) = crate::grid::gauss_legendre_on(400, 0.0, PI);
        x.iter()
            .zip(&w)
            .map(|(c, w)| w * 4.0 * PI * c.sin().powi(2) * (1.0 - r * r) / (1.0 - 2.0 * r * c.cos() + r * r))
            .sum()
    }

    #[test]
    fn hopf_density_is_eight() {
        let g = S3Grid::uniform(12);
        let d = density_field(&MapKind::Hopf, &g);
        assert!(d.iter().all(|x| (x - 8.0).abs() < 1e-10));
        let e = dirichlet_energy(&MapKind::Hopf, &g).unwrap();
        assert!((e - 16.0 * PI * PI).abs() < 1e-6);
        for z in g.points().iter().take(50) {
            assert!((MapKind::Hopf.eval(z).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pi_conformal_identity_and_energy() {
        let g = grid();
        for z in g.points().iter().step_by(97) {
            let d = MapKind::PiProjection.density(z);
            assert!((d * (1.0 - z[3] * z[3]) - 2.0).abs() < 1e-8);
        }
        let e = dirichlet_energy(&MapKind::PiProjection, &g).unwrap();
        assert!((e - 8.0 * PI * PI).abs() < 1e-3);
        assert!(matches!(
            dirichlet_energy(&MapKind::PiProjection, &S3Grid::uniform(16)),
            Err(LabError::GridTooCoarse(_))
        ));
    }

    #[test]
    fn constant_map_has_zero_energy() {
        let m = MapKind::Constant { value: Vec3::z() };
        assert_eq!(dirichlet_energy(&m, &S3Grid::uniform(8)).unwrap(), 0.0);
    }

    #[test]
    fn jets_match_finite_differences() {
        let z = Vec4::new(0.3, -0.5, 0.6, 0.2).normalize();
        let kinds = [
            MapKind::Hopf,
            MapKind::PiProjection,
            MapKind::Vb { b: Vec3::new(1.0, 2.0, -2.0) / 3.0 },
            MapKind::Conjugation { b: Vec3::new(0.2, -0.1, 0.3), a: Vec4::new(0.1, 0.2, -0.3, 0.1) },
            MapKind::Mobius { inner: Box::new(MapKind::PiProjection), a: Vec4::new(0.4, 0.0, 0.1, -0.2) },
        ];
        for m in &kinds {
            for e in tangent_frame(&z) {
                let h = 1e-6;
                let p = |s: f64| {
                    let y = z + e * s;
                    m.eval(&y.normalize())
                };
                let fd = (p(h) - p(-h)) / (2.0 * h);
                let an = m.jet(&z, &e).1;
                assert!((fd - an).norm() < 1e-7, "{}: {fd} vs {an}", m.name());
            }
        }
    }

    #[test]
    fn vb_relations() {
        let z = Vec4::new(0.1, 0.7, -0.2, 0.4).normalize();
        let vi = MapKind::Vb { b: Vec3::x() }.eval(&z);
        assert!((vi + MapKind::Hopf.eval(&z)).norm() < 1e-14);
        let g = S3Grid::uniform(12);
        let mut rng = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..10 {
            let b = Vec3::new(next(), next(), next()).normalize();
            let e = dirichlet_energy(&MapKind::Vb { b }, &g).unwrap();
            assert!((e - 16.0 * PI * PI).abs() < 1e-6);
        }
    }

    #[test]
    fn hopf_profile_closed_form() {
        let g = grid();
        let a_list: Vec<Vec4> = [0.0, 0.3, 0.6, 0.9]
            .iter()
            .map(|r| Vec4::new(0.0, 0.0, 0.0, *r))
            .collect();
        let rows = mobius_profile(&MapKind::Hopf, &a_list, &g).unwrap();
        for row in &rows {
            let oracle = 8.0 * weight_volume_oracle(row.a_norm);
            assert!((row.energy - oracle).abs() < 1e-4 * oracle.max(1.0), "{row:?} {oracle}");
            assert!((row.energy - 16.0 * PI * PI * (1.0 - row.a_norm.powi(2))).abs() < 1e-4);
        }
        assert!((rows[0].energy - dirichlet_energy(&MapKind::Hopf, &g).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pulled_back_matches_direct_for_smooth_maps() {
        let g = S3Grid::uniform(48);
        let m = MapKind::Mobius { inner: Box::new(MapKind::Hopf), a: Vec4::new(0.2, -0.1, 0.3, 0.1) };
        let pulled = dirichlet_energy(&m, &g).unwrap();
        let direct = direct_energy(&m, &g).unwrap();
        assert!((pulled - direct).abs() < 1e-6 * direct);
    }

    #[test]
    fn pi_profile_decreases_and_matches_reduction() {
        let g = grid();
        let a_list: Vec<Vec4> = [0.0, 0.25, 0.5, 0.75]
            .iter()
            .map(|t| Vec4::new(*t, 0.0, 0.0, 0.0))
            .collect();
        let rows = mobius_profile(&MapKind::PiProjection, &a_list, &g).unwrap();
        assert!((rows[0].energy - 8.0 * PI * PI).abs() < 1e-3);
        for w in rows.windows(2) {
            assert!(w[1].energy < w[0].energy);
        }
        for row in &rows {
            let t = row.a_norm;
            assert!((row.energy - reduced_integral(t)).abs() < 2e-3);
            assert!((row.energy - slice_reduction(t, 128)).abs() < 2e-3);
        }
    }

    #[test]
    fn conjugation_family_values() {
        let coarse = conjugation_family_energy(&Vec3::zeros(), &Vec4::zeros(), &grid()).unwrap();
        let fine = conjugation_family_energy(&Vec3::zeros(), &Vec4::zeros(), &S3Grid::uniform(96)).unwrap();
        assert!(coarse.is_finite() && (coarse - fine).abs() < 1e-3);
        let e = conjugation_family_energy(&Vec3::new(0.5, 0.0, 0.0), &Vec4::zeros(), &grid()).unwrap();
        assert!(e.is_finite() && e > 0.0);
        assert!(conjugation_family_energy(&Vec3::new(0.99, 0.0, 0.0), &Vec4::zeros(), &grid()).is_err());
    }

    #[test]
    fn conjugation_tends_to_pi_profile_as_a_leaves_the_ball() {
        // the excess over E(π∘Ψ_b) is the energy of the conjugating factor,
        // which vanishes like 1−|a|²
        let g = grid();
        let b = Vec3::new(0.5, 0.0, 0.0);
        let base = mobius_profile(&MapKind::PiProjection, &[Vec4::new(0.5, 0.0, 0.0, 0.0)], &g).unwrap()[0].energy;
        let mut last = f64::INFINITY;
        for r in [0.0, 0.5, 0.8, 0.9, 0.95] {
            let excess = conjugation_family_energy(&b, &Vec4::new(0.0, 0.0, 0.0, r), &g).unwrap() - base;
            assert!(excess > 0.0 && excess < last);
            assert!(excess <= 16.0 * PI * PI * (1.0 - r * r));
            last = excess;
        }
    }
}
