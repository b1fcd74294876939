//! Dirichlet energies of the Hopf map and of π, and their profiles along a ray of
//! Möbius parameters. The π column is compared with its one-dimensional reduction.
//!
//! cargo run --release --example sphere_map_energies -- [N]

use minmax_lab::algebra::Vec4;
use minmax_lab::grid::S3Grid;
use minmax_lab::spheremaps::{dirichlet_energy, mobius_profile, reduced_integral, MapKind};

fn main() -> minmax_lab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let g = S3Grid::uniform(n);
    let pi2 = std::f64::consts::PI.powi(2);
    println!("E(hopf) = {:.10}  (16pi^2 = {:.10})", dirichlet_energy(&MapKind::Hopf, &g)?, 16.0 * pi2);
    println!("E(pi)   = {:.10}  (8pi^2  = {:.10})", dirichlet_energy(&MapKind::PiProjection, &g)?, 8.0 * pi2);
    let ts: Vec<f64> = (0..10).map(|i| 0.1 * i as f64).collect();
    let a: Vec<Vec4> = ts.iter().map(|t| Vec4::new(*t, 0.0, 0.0, 0.0)).collect();
    let hopf = mobius_profile(&MapKind::Hopf, &a, &g)?;
    let pi = mobius_profile(&MapKind::PiProjection, &a, &g)?;
    println!("t     hopf          pi            reduced");
    for ((t, h), p) in ts.iter().zip(&hopf).zip(&pi) {
        println!("{t:.1}   {:.8}  {:.8}  {:.8}", h.energy, p.energy, reduced_integral(*t));
    }
    Ok(())
}
