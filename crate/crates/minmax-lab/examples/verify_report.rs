//! Run a check suite from code, write the JSON report and a CSV of its records.
//!
//! cargo run --release --example verify_report -- [surface|canonical|maps|eigen|ellipsoid] [OUT_DIR]

use minmax_lab::report::{records_csv, Report};
use minmax_lab::verify::{run, CheckConfig, Suite};
use std::path::PathBuf;

fn main() -> minmax_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let suite = Suite::parse(&args.next().unwrap_or_else(|| "surface".into()))?;
    let dir = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().display().to_string()));
    let cfg = CheckConfig { grid: 64, ..CheckConfig::default() };
    let records = run(suite, &cfg);
    for r in &records {
        println!("{} {}/{}", if r.passed { "PASS" } else { "FAIL" }, r.suite, r.name);
    }
    records_csv(&records, std::fs::File::create(dir.join("records.csv"))?)?;
    let report = Report::new(suite.name(), records);
    std::fs::write(dir.join("report.json"), report.to_json()?)?;
    println!("passed: {}; wrote {}", report.passed, dir.display());
    Ok(())
}
