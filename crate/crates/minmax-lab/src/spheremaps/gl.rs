//! Ginzburg–Landau energy E_ε(u) = ½∫|du|² + (1/2ε²)∫(1−|u|²)² for u: S³ → R³.
//!
//! The discrete energy uses spectral chart derivatives on an S3Grid and its
//! quadrature. The gradient is the exact gradient of that discrete energy in the
//! quadrature-weighted L² product, so it is W⁻¹ Σ Dᵀ W g^{aa} D u − (2/ε²) u (1−|u|²).

use crate::error::{LabError, Result};
use crate::grid::{SampledMap, S3Grid};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct GLState {
    /// R³-valued samples, one per grid node.
    pub u: SampledMap,
    pub eps: f64,
}

impl GLState {
    pub fn new(u: SampledMap, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(LabError::BadParameter(format!("epsilon = {eps}")));
        }
        if u.dim != 3 {
            return Err(LabError::BadParameter(format!("field dimension {}", u.dim)));
        }
        Ok(GLState { u, eps })
    }
}

/// Inverse metric diagonal (1, 1/sin²χ, 1/(sin²χ sin²θ)) at every node.
fn inverse_metric(grid: &S3Grid) -> Vec<[f64; 3]> {
    (0..grid.len())
        .map(|i| {
            let sc2 = grid.grid.coord(i, 0).sin().powi(2);
            let st2 = grid.grid.coord(i, 1).sin().powi(2);
            [1.0, 1.0 / sc2, 1.0 / (sc2 * st2)]
        })
        .collect()
}

fn check(s: &GLState, grid: &S3Grid) -> Result<()> {
    if s.u.len() != grid.len() {
        return Err(LabError::BadParameter(format!(
            "field has {} samples, grid has {}",
            s.u.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// Discrete E_ε.
pub fn gl_energy(s: &GLState, grid: &S3Grid) -> Result<f64> {
    check(s, grid)?;
    let ginv = inverse_metric(grid);
    let mut dens = vec![0.0; grid.len()];
    for axis in 0..3 {
        let d = grid.grid.differentiate(&s.u, axis)?;
        dens.par_iter_mut().enumerate().for_each(|(i, x)| {
            let g = d.node(i);
            *x += 0.5 * ginv[i][axis] * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        });
    }
    let k = 0.5 / (s.eps * s.eps);
    dens.par_iter_mut().enumerate().for_each(|(i, x)| {
        let p = 1.0 - s.u.vec3(i).norm_squared();
        *x += k * p * p;
    });
    Ok(grid.integrate(&dens))
}

/// Gradient of the discrete E_ε in the quadrature-weighted L² product.
pub fn gl_gradient(s: &GLState, grid: &S3Grid) -> Result<SampledMap> {
    check(s, grid)?;
    let ginv = inverse_metric(grid);
    let n = grid.len();
    let mut out = vec![0.0; 3 * n];
    for axis in 0..3 {
        let mut d = grid.grid.differentiate(&s.u, axis)?;
        d.data.par_chunks_mut(3).enumerate().for_each(|(i, c)| {
            let w = grid.dvol(i) * ginv[i][axis];
            c.iter_mut().for_each(|x| *x *= w);
        });
        let t = grid.grid.differentiate_transpose(&d, axis)?;
        out.iter_mut().zip(&t.data).for_each(|(o, x)| *o += x);
    }
    let k = 2.0 / (s.eps * s.eps);
    out.par_chunks_mut(3).enumerate().for_each(|(i, c)| {
        let u = s.u.vec3(i);
        let p = 1.0 - u.norm_squared();
        let w = grid.dvol(i);
        for j in 0..3 {
            c[j] = c[j] / w - k * u[j] * p;
        }
    });
    Ok(SampledMap::new(3, out))
}
