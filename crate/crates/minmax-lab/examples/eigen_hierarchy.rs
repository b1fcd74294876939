//! Minmax hierarchy of the discrete Laplacian against the dense eigensolver.
//!
//!     cargo run --release --example eigen_hierarchy -- circle:128 3

use minmax_lab::minmax::{eigen_hierarchy, eigen_oracle, DiscreteManifold, RayleighEnergy, WidthOptions};

fn main() -> minmax_lab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let manifold = DiscreteManifold::parse(args.get(1).map(String::as_str).unwrap_or("circle:128"))?;
    let levels: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let t = std::time::Instant::now();
    let oracle = eigen_oracle(&RayleighEnergy::new(manifold)?, levels);
    let hierarchy = eigen_hierarchy(manifold, levels, 9, 1, &WidthOptions::default())?;
    for (h, o) in hierarchy.iter().zip(&oracle) {
        println!(
            "level {}  width {:.12}  oracle {:.12}  rel {:.1e}  multiplicity {}/{}  index {} (N_k {})  steps {}  violations {}",
            h.level,
            h.report.critical_value,
            o.value,
            (h.report.critical_value - o.value).abs() / o.value.abs().max(1.0),
            h.space.multiplicity(),
            o.multiplicity(),
            h.report.morse_index,
            h.cumulative_multiplicity,
            h.report.accepted_steps,
            h.report.violations,
        );
    }
    eprintln!("{:.1?}", t.elapsed());
    Ok(())
}
