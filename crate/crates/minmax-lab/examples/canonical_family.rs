//! Scan A over the Möbius family Ψ_a∘Φ of a minimal surface and report where it peaks.
//!
//! cargo run --release --example canonical_family -- [clifford|sphere]

use minmax_lab::canonical::{family_scan, polar_a_grid, summarize};
use minmax_lab::grid::S3Grid;
use minmax_lab::surface::{builtin_surface, geometry, SurfaceKind};

fn main() -> minmax_lab::Result<()> {
    let kind = SurfaceKind::parse(&std::env::args().nth(1).unwrap_or_else(|| "clifford".into()))?;
    let imm = builtin_surface(kind, 64)?;
    let geo = geometry(&imm)?;
    let rows = family_scan(&imm, &geo, &polar_a_grid(6, &S3Grid::new(6, 6, 12), 0.9))?;
    for r in rows.iter().step_by(rows.len() / 12) {
        println!("|g| {:.3}  A {:.8}  degree {:+.3}  max|C| {:.3}", r.g_norm, r.a_functional, r.degree, r.max_abs_c);
    }
    let s = summarize(&rows);
    println!("{} members: max {:.10} at a = {:?}, min {:.6}, max|C| {:.12}", s.count, s.max, s.argmax, s.min, s.max_abs_c);
    Ok(())
}
