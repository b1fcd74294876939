//! Area, Willmore energy, Gauss map degree and the A functional for the built-in
//! surfaces, plus the Lagrangian residual of (Φ, n).
//!
//! cargo run --release --example surface_geometry -- [N]

use minmax_lab::surface::{
    a_functional, area, builtin_surface, gauss_map, geometry, lagrangian_residual, willmore, SurfaceKind,
};

fn main() -> minmax_lab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    println!("surface     area          willmore      sup|H|    degree  A             lagrangian");
    for kind in [SurfaceKind::Clifford, SurfaceKind::GeodesicSphere { axis: 3 }] {
        let imm = builtin_surface(kind, n)?;
        let geo = geometry(&imm)?;
        let gm = gauss_map(&imm, &geo)?;
        println!(
            "{:<10}  {:.10}  {:.10}  {:.1e}  {:>6}  {:.10}  {:.1e}",
            if kind == SurfaceKind::Clifford { "clifford" } else { "sphere" },
            area(&imm, &geo),
            willmore(&imm, &geo),
            geo.sup_mean_curvature(),
            gm.degree.rounded,
            a_functional(&gm)?,
            lagrangian_residual(&imm, &geo)?,
        );
    }
    Ok(())
}
