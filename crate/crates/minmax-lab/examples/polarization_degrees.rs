//! Degrees of the boundary lift of the unit ball and of the S¹×Σ polarization lift.

use minmax_lab::canonical::s1_sigma_lift;
use minmax_lab::grid::{boundary_lift, degree_via_lift, S3Grid};
use minmax_lab::surface::{builtin_surface, geometry, SurfaceKind};

fn main() -> minmax_lab::Result<()> {
    let s3 = S3Grid::uniform(16);
    let d = degree_via_lift(&s3.grid, &boundary_lift(&s3))?;
    println!("boundary lift     degree {} (integral {:.12})", d.rounded, d.raw);
    for kind in [SurfaceKind::GeodesicSphere { axis: 3 }, SurfaceKind::Clifford] {
        let imm = builtin_surface(kind, 32)?;
        let p = s1_sigma_lift(&imm, &geometry(&imm)?, 32)?;
        println!(
            "S1 x {:<11} degree {} (product orientation {:+.12})",
            if kind == SurfaceKind::Clifford { "torus" } else { "sphere" },
            p.oriented.rounded,
            p.raw.raw
        );
    }
    Ok(())
}
