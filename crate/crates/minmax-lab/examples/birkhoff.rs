//! Birkhoff curve shortening on an ellipsoid, started from a tilted central slice.
//! It settles on a principal ellipse; its length is compared with its perimeter.

use minmax_lab::minmax::{
    birkhoff_shorten, ellipse_perimeter, plane_slice, CurveEnergy, EllipsoidSpec,
};
use minmax_lab::algebra::Vec3;

fn main() -> minmax_lab::Result<()> {
    let spec = EllipsoidSpec::new(1.0, 1.2, 1.5)?;
    let e = CurveEnergy::new(spec, 128)?;
    let d = Vec3::new(0.0, 0.25, 1.0).normalize();
    let start = plane_slice(&spec, &d, 0.0, 128);
    let r = birkhoff_shorten(&e, &start, 20_000, 1e-4, 1e-3)?;
    for (k, en) in r.energies.iter().enumerate().step_by((r.energies.len() / 10).max(1)) {
        println!("sweep {k:>5}  energy {en:.10}");
    }
    println!(
        "{} sweeps, length {:.8}, stationarity {:.1e}; ellipse (1, 1.2) perimeter {:.8}",
        r.iterations,
        r.length,
        r.stationarity,
        ellipse_perimeter(1.0, 1.2)
    );
    Ok(())
}
