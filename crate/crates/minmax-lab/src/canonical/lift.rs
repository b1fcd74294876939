//! SO(3)-degree of the polarization lift over S¹ × Σ.

use crate::error::Result;
use crate::grid::{degree_via_lift, Axis, Degree, ProductGrid, SampledMap};
use crate::surface::{DiscreteImmersion, SurfaceGeometry};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PolarizationDegree {
    /// Integral in the product orientation dα∧dx₁∧dx₂.
    pub raw: Degree,
    /// S¹×Σ taken as the inner boundary component of the cell (opposite to the product orientation).
    pub oriented: Degree,
}

/// Degree of (α, x) ↦ cos α n(x) + sin α Φ(x), α ∈ (−π/2, π/2).
pub fn s1_sigma_lift(
    imm: &DiscreteImmersion,
    geo: &SurfaceGeometry,
    n_alpha: usize,
) -> Result<PolarizationDegree> {
    let mut axes = vec![Axis::legendre(n_alpha, -FRAC_PI_2, FRAC_PI_2)];
    axes.extend(imm.grid.axes.iter().cloned());
    let grid = ProductGrid::new(axes);
    let m = imm.len();
    let mut data = Vec::with_capacity(grid.len() * 4);
    for k in 0..n_alpha {
        let a = grid.axes[0].nodes[k];
        for i in 0..m {
            let v = geo.normal[i] * a.cos() + imm.phi.vec4(i) * a.sin();
            data.extend_from_slice(v.as_slice());
        }
    }
    let raw = degree_via_lift(&grid, &SampledMap::new(4, data))?;
    Ok(PolarizationDegree {
        raw,
        oriented: Degree::from_raw(-raw.raw),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{builtin_surface, geometry, SurfaceKind};

    #[test]
    fn sphere_and_torus_lift_degrees() {
        let s = builtin_surface(SurfaceKind::GeodesicSphere { axis: 3 }, 24).unwrap();
        let d = s1_sigma_lift(&s, &geometry(&s).unwrap(), 24).unwrap();
        assert_eq!(d.raw.rounded, -2);
        assert_eq!(d.oriented.rounded, 2);
        assert!(d.oriented.residual < 1e-8, "{d:?}");
        let t = builtin_surface(SurfaceKind::Clifford, 24).unwrap();
        let d = s1_sigma_lift(&t, &geometry(&t).unwrap(), 24).unwrap();
        assert_eq!(d.oriented.rounded, 0);
        assert!(d.oriented.residual < 1e-8);
    }
}
