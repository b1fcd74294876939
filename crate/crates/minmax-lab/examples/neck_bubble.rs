//! Bubble, neck and bad-set areas along a ray approaching the Clifford torus, and
//! the convergence of the rescaled Gauss map to its bubble limit.

use minmax_lab::canonical::{bubble_angle, bubble_coords, bubble_limit, neck_decomposition, rescaled_gauss};
use minmax_lab::surface::{builtin_surface, frame_from_jet, SurfaceKind};

fn main() -> minmax_lab::Result<()> {
    let imm = builtin_surface(SurfaceKind::Clifford, 128)?;
    let f = frame_from_jet(&SurfaceKind::Clifford.eval(1.0, 2.0), 1.0);
    let probes = [[0.5, 0.2], [-1.0, 0.7], [0.0, 0.0]];
    println!("1-|g|     d_g        bubble     neck       bad        total      sup error");
    for eps in [1e-2, 1e-3, 1e-4] {
        let g = -(1.0 - eps) * f.phi;
        let na = neck_decomposition(&imm, &g, 0.1, 0.1, 256)?;
        let bc = bubble_coords(&imm, &g)?;
        let alpha = bubble_angle(&bc);
        let mut err: f64 = 0.0;
        for x in probes {
            err = err.max(rescaled_gauss(&imm, &g, &bc, x)?.dist(&bubble_limit(alpha, &bc.frame, x)));
        }
        println!(
            "{eps:.0e}  {:.3e}  {:.3e}  {:.3e}  {:.3e}  {:.3e}  {err:.3e}",
            na.d, na.bubble_area, na.neck_area, na.bad_area, na.total_area
        );
    }
    Ok(())
}
