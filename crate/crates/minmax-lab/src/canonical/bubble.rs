//! Nearest-point coordinates of −g/|g|, the bubble/neck split of the Gauss area,
//! and the rescaled Gauss map against its explicit limit.

use super::{canonical_point, transformed_gauss_point, MobiusParam};
use crate::algebra::{wedge, GrassPoint, Vec4};
use crate::error::{LabError, Result};
use crate::surface::{frame_from_jet, DiscreteImmersion, PointFrame, SurfaceKind};
use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Newton tolerance on the stationarity condition of the projection.
pub const PROJECTION_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 20;

/// −g/|g| = cos t Φ(x) + sin t n(x), d = √((1−|g|) + t²).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BubbleCoords {
    pub x: [f64; 2],
    pub t: f64,
    pub d: f64,
    pub g_norm: f64,
    #[serde(skip)]
    pub frame: PointFrame,
    pub residual: f64,
}

fn closed_kind(imm: &DiscreteImmersion) -> Result<SurfaceKind> {
    imm.kind
        .ok_or_else(|| LabError::BadParameter("needs a closed-form chart".into()))
}

fn wrap_coord(kind: &SurfaceKind, axis: usize, x: f64) -> Result<f64> {
    let (periodic, lo, hi) = kind.chart_domain(axis);
    if periodic {
        Ok(lo + (x - lo).rem_euclid(hi - lo))
    } else if x > lo && x < hi {
        Ok(x)
    } else {
        Err(LabError::ChartOverflow(format!("coordinate {axis} = {x} outside ({lo}, {hi})")))
    }
}

/// Chart displacement from `from` to `to`, shortest on periodic axes.
fn chart_delta(kind: &SurfaceKind, from: [f64; 2], to: [f64; 2]) -> [f64; 2] {
    let mut d = [to[0] - from[0], to[1] - from[1]];
    for (k, dk) in d.iter_mut().enumerate() {
        let (periodic, lo, hi) = kind.chart_domain(k);
        if periodic {
            let p = hi - lo;
            *dk -= p * (*dk / p).round();
        }
    }
    d
}

pub fn bubble_coords(imm: &DiscreteImmersion, g: &Vec4) -> Result<BubbleCoords> {
    let kind = closed_kind(imm)?;
    let g_norm = g.norm();
    if g_norm == 0.0 || g_norm >= 1.0 {
        return Err(LabError::BadParameter(format!("|g| = {g_norm} not in (0,1)")));
    }
    let p = -g / g_norm;
    let dist: Vec<f64> = (0..imm.len()).map(|i| (imm.phi.vec4(i) - p).norm()).collect();
    let (imin, dmin) = dist
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, d)| if *d < b.1 { (i, *d) } else { b });
    let pmin = imm.phi.vec4(imin);
    for (i, d) in dist.iter().enumerate() {
        if *d <= dmin + 1e-9 && (imm.phi.vec4(i) - pmin).norm() > 0.25 {
            return Err(LabError::NoUniqueProjection(format!(
                "nodes {imin} and {i} are equidistant ({dmin:.6})"
            )));
        }
    }

    let mut x = [imm.grid.coord(imin, 0), imm.grid.coord(imin, 1)];
    let mut converged = false;
    for _ in 0..MAX_NEWTON {
        let j = kind.eval(x[0], x[1]);
        let grad = Vector2::new(-p.dot(&j.d1), -p.dot(&j.d2));
        let scale = j.d1.norm().max(j.d2.norm());
        if grad.norm() <= PROJECTION_TOL * scale {
            converged = true;
            break;
        }
        let h = Matrix2::new(-p.dot(&j.d11), -p.dot(&j.d12), -p.dot(&j.d12), -p.dot(&j.d22));
        let step = match h.cholesky() {
            Some(c) => -c.solve(&grad),
            None => -grad / (scale * scale),
        };
        x = [wrap_coord(&kind, 0, x[0] + step[0])?, wrap_coord(&kind, 1, x[1] + step[1])?];
    }
    if !converged {
        return Err(LabError::NoUniqueProjection("projection Newton did not converge".into()));
    }
    let frame = frame_from_jet(&kind.eval(x[0], x[1]), imm.orientation);
    let t = p.dot(&frame.n).atan2(p.dot(&frame.phi));
    let kmax = frame.principal[0].abs().max(frame.principal[1].abs());
    if t.abs() >= PI / 2.0 || t.abs().tan() * kmax >= 1.0 - 1e-9 {
        return Err(LabError::NoUniqueProjection(format!(
            "t = {t} reaches the focal set (κ = {kmax})"
        )));
    }
    let residual = (p - (frame.phi * t.cos() + frame.n * t.sin())).norm();
    Ok(BubbleCoords {
        x,
        t,
        d: ((1.0 - g_norm) + t * t).sqrt(),
        g_norm,
        frame,
        residual,
    })
}

/// T± at (α, x) evaluated at the plane point X.
pub fn bubble_limit(alpha: f64, frame: &PointFrame, big_x: [f64; 2]) -> GrassPoint {
    let (e1, e2) = frame.tangent_frame();
    let xv = e1 * big_x[0] + e2 * big_x[1];
    let r2 = big_x[0] * big_x[0] + big_x[1] * big_x[1];
    let den = 1.0 + r2;
    let b = wedge(&frame.phi, &frame.n)
        .scale((1.0 - r2) / den)
        .add(&wedge(&xv, &frame.n).scale(2.0 * alpha.cos() / den))
        .add(&wedge(&xv, &frame.phi).scale(2.0 * alpha.sin() / den));
    let (plus, minus) = b.split();
    GrassPoint { plus, minus }
}

/// α with cos α = √(2−2|g|)/D, sin α = t/D.
pub fn bubble_angle(bc: &BubbleCoords) -> f64 {
    bc.t.atan2((2.0 - 2.0 * bc.g_norm).sqrt())
}

/// 𝔊_g at x_g + D·X, X in the orthonormal tangent frame at x_g, D = √(t² + 2 − 2|g|).
pub fn rescaled_gauss(
    imm: &DiscreteImmersion,
    g: &Vec4,
    bc: &BubbleCoords,
    big_x: [f64; 2],
) -> Result<GrassPoint> {
    let kind = closed_kind(imm)?;
    let dd = (bc.t * bc.t + 2.0 - 2.0 * bc.g_norm).sqrt();
    let (e1, e2) = bc.frame.tangent_frame();
    let jm = Matrix2::new(
        e1.dot(&bc.frame.d1),
        e1.dot(&bc.frame.d2),
        e2.dot(&bc.frame.d1),
        e2.dot(&bc.frame.d2),
    );
    let dx = jm
        .try_inverse()
        .ok_or_else(|| LabError::BadParameter("singular chart frame".into()))?
        * Vector2::new(dd * big_x[0], dd * big_x[1]);
    let x0 = wrap_coord(&kind, 0, bc.x[0] + dx[0])?;
    let x1 = wrap_coord(&kind, 1, bc.x[1] + dx[1])?;
    let fr = frame_from_jet(&kind.eval(x0, x1), imm.orientation);
    transformed_gauss_point(&MobiusParam::from_g(*g)?, &fr.phi, &fr.n)
}

/// Gauss-area split for one parameter g, in dvol_𝔊g.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NeckAreas {
    pub bubble_area: f64,
    pub neck_area: f64,
    pub bad_area: f64,
    pub total_area: f64,
    /// sup over the bubble region of |4C² − 1|.
    pub bubble_defect: f64,
    pub d: f64,
    pub t: f64,
}

/// Periodic nodes clustered at `center`: x = center + 2 atan(κ tan(s/2)).
fn graded_periodic(n: usize, center: f64, kappa: f64) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|k| {
            let s = -PI + (k as f64 + 0.5) * h;
            let x = center + 2.0 * (kappa * (0.5 * s).tan()).atan();
            let c = (0.5 * s).cos();
            let sn = (0.5 * s).sin();
            (x, h * kappa / (c * c + kappa * kappa * sn * sn))
        })
        .unzip()
}

/// Bubble {|x−x_g| ≤ d/η}, neck {d/η < |x−x_g| < η}, bad set {4C² < 1−δ}.
/// Integrated from closed-form fields on an n_fine² grid graded toward x_g.
pub fn neck_decomposition(
    imm: &DiscreteImmersion,
    g: &Vec4,
    eta: f64,
    delta: f64,
    n_fine: usize,
) -> Result<NeckAreas> {
    if !(eta > 0.0 && eta < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(LabError::BadParameter(format!("η = {eta}, δ = {delta}")));
    }
    let kind = closed_kind(imm)?;
    let bc = bubble_coords(imm, g)?;
    let lam = bc.frame.metric[0].max(bc.frame.metric[2]).sqrt();
    let spacing = bc.d / lam / 8.0;
    let kappa = (spacing * n_fine as f64 / (2.0 * PI)).min(1.0);
    let axis_nodes = |k: usize| -> (Vec<f64>, Vec<f64>) {
        let (periodic, lo, hi) = kind.chart_domain(k);
        if periodic {
            graded_periodic(n_fine, bc.x[k], kappa)
        } else {
            crate::grid::gauss_legendre_on(n_fine, lo, hi)
        }
    };
    let (x0, w0) = axis_nodes(0);
    let (x1, w1) = axis_nodes(1);
    let gm = Matrix2::new(bc.frame.metric[0], bc.frame.metric[1], bc.frame.metric[1], bc.frame.metric[2]);
    let r_bubble = bc.d / eta;
    let rows: Vec<[f64; 5]> = (0..n_fine)
        .into_par_iter()
        .map(|i| {
            let mut acc = [0.0, 0.0, 0.0, 0.0, 0.0];
            for j in 0..n_fine {
                let fr = frame_from_jet(&kind.eval(x0[i], x1[j]), imm.orientation);
                let kap = 0.5 * (fr.principal[0] - fr.principal[1]).abs();
                let p = canonical_point(g, &fr.phi, &fr.n, kap);
                let dens = p.gauss_ratio * fr.sqrt_det() * w0[i] * w1[j];
                let dx = chart_delta(&kind, bc.x, [x0[i], x1[j]]);
                let v = Vector2::new(dx[0], dx[1]);
                let dist = (v.transpose() * gm * v)[(0, 0)].max(0.0).sqrt();
                let c4 = 4.0 * p.c * p.c;
                acc[3] += dens;
                if dist <= r_bubble {
                    acc[0] += dens;
                    acc[4] = acc[4].max((c4 - 1.0).abs());
                } else if dist < eta {
                    acc[1] += dens;
                }
                if c4 < 1.0 - delta {
                    acc[2] += dens;
                }
            }
            acc
        })
        .collect();
    let mut s = [0.0; 5];
    for r in &rows {
        for k in 0..4 {
            s[k] += r[k];
        }
        s[4] = s[4].max(r[4]);
    }
    Ok(NeckAreas {
        bubble_area: s[0],
        neck_area: s[1],
        bad_area: s[2],
        total_area: s[3],
        bubble_defect: s[4],
        d: bc.d,
        t: bc.t,
    })
}
