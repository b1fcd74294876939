//! Three slicing widths of the ellipsoid (1, 1.2, 1.5) against the principal
//! ellipse perimeters.

use minmax_lab::minmax::{ellipsoid_widths, EllipsoidSpec, WidthOptions};

fn main() -> minmax_lab::Result<()> {
    let spec = EllipsoidSpec::new(1.0, 1.2, 1.5)?;
    let opts = WidthOptions {
        pull_tol: 1e-8,
        polish_tol: 1e-10,
        max_iter: 100,
    };
    let t = std::time::Instant::now();
    for w in ellipsoid_widths(&spec, 17, 128, &opts)? {
        println!(
            "level {}  width {:.10}  perimeter {:.10}  sweep max {:.6}  index {}  steps {}  violations {}",
            w.level, w.width, w.oracle, w.sweep_max, w.report.morse_index, w.report.accepted_steps,
            w.report.violations
        );
    }
    eprintln!("{:.1?}", t.elapsed());
    Ok(())
}
