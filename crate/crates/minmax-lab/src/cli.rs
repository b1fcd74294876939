//! Command-line front end: `verify` and `scan`, exit codes 0 pass, 1 check
//! failure, 2 config error.

use crate::error::{LabError, Result};
use crate::minmax::{DiscreteManifold, EllipsoidSpec};
use crate::report::{records_csv, table_csv, Environment, Record, Report, SCHEMA_VERSION};
use crate::scan::{self, ScanKind, ScanOutput, Table};
use crate::spheremaps::MapKind;
use crate::surface::SurfaceKind;
use crate::verify::{self, CheckConfig, Suite};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "minmax-lab", version, about = "Gauss maps, canonical families, sphere maps and minmax widths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a check suite and write a report.
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[command(flatten)]
        common: Common,
    },
    /// Write a plot-ready CSV table and a JSON summary.
    Scan {
        #[arg(value_enum)]
        kind: ScanArg,
        /// Surface for family scans: clifford, sphere.
        #[arg(long, default_value = "clifford")]
        surface: String,
        /// Map for profile scans: hopf, pi.
        #[arg(long, default_value = "pi")]
        map: String,
        /// Semi-axes a,b,c for ellipsoid widths.
        #[arg(long, default_value = "1,1.2,1.5")]
        ellipsoid: String,
        /// circle:N or torus:N; switches widths to the eigenvalue instance.
        #[arg(long)]
        manifold: Option<String>,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Parameter samples per sweepout axis (ellipsoid).
        #[arg(long, default_value_t = 17)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Base resolution N (power of two, ≥ 8).
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    /// Stopping tolerance of the minmax pull-tight loops.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Print wall-clock time to stderr.
    #[arg(long)]
    pub timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteArg {
    All,
    Surface,
    Canonical,
    Maps,
    Eigen,
    Ellipsoid,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanArg {
    Family,
    Neck,
    Profile,
    Widths,
}

/// The validated configuration, serialized into every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanKind>,
    pub grid: usize,
    pub tol: Option<f64>,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn check_config(&self) -> CheckConfig {
        CheckConfig {
            grid: self.grid,
            seed: self.seed,
            tol: self.tol,
        }
    }
}

fn validate_common(c: &Common) -> Result<()> {
    if c.grid < 8 || !c.grid.is_power_of_two() {
        return Err(LabError::Config(format!("--grid {} must be a power of two ≥ 8", c.grid)));
    }
    if let Some(t) = c.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(LabError::Config(format!("--tol {t} must be positive")));
        }
    }
    if c.jobs == Some(0) {
        return Err(LabError::Config("--jobs must be ≥ 1".into()));
    }
    Ok(())
}

fn suite_of(s: SuiteArg) -> Suite {
    match s {
        SuiteArg::All => Suite::All,
        SuiteArg::Surface => Suite::Surface,
        SuiteArg::Canonical => Suite::Canonical,
        SuiteArg::Maps => Suite::Maps,
        SuiteArg::Eigen => Suite::Eigen,
        SuiteArg::Ellipsoid => Suite::Ellipsoid,
    }
}

fn config(cmd: &Command) -> Result<(RunConfig, &Common)> {
    let (command, suite, scan, common) = match cmd {
        Command::Verify { suite, common } => ("verify", Some(suite_of(*suite)), None, common),
        Command::Scan {
            kind,
            surface,
            map,
            ellipsoid,
            manifold,
            levels,
            samples,
            common,
        } => {
            let k = match kind {
                ScanArg::Family => {
                    let s = SurfaceKind::parse(surface)?;
                    if !matches!(s, SurfaceKind::Clifford | SurfaceKind::GeodesicSphere { .. }) {
                        return Err(LabError::Config(format!("family scans need a minimal surface, got {surface}")));
                    }
                    ScanKind::Family { surface: s }
                }
                ScanArg::Neck => ScanKind::Neck,
                ScanArg::Profile => ScanKind::Profile {
                    map: MapKind::parse(map).map_err(|e| LabError::Config(e.to_string()))?,
                },
                ScanArg::Widths => match manifold {
                    Some(m) => {
                        if !(1..=4).contains(levels) {
                            return Err(LabError::Config(format!("--levels {levels} not in 1..=4")));
                        }
                        ScanKind::EigenWidths {
                            manifold: DiscreteManifold::parse(m)?,
                            levels: *levels,
                        }
                    }
                    None => ScanKind::EllipsoidWidths {
                        spec: EllipsoidSpec::parse(ellipsoid)?,
                        samples: *samples,
                    },
                },
            };
            ("scan", None, Some(k), common)
        }
    };
    validate_common(common)?;
    Ok((
        RunConfig {
            command,
            suite,
            scan,
            grid: common.grid,
            tol: common.tol,
            seed: common.seed,
            jobs: common.jobs,
            format: common.format,
            out: common.out.clone(),
        },
        common,
    ))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn sibling(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Serialize)]
struct ScanReport<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    environment: Environment,
    summary: &'a [Record],
    passed: bool,
    table: &'a Table,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a Table>,
}

fn write_scan(cfg: &RunConfig, out: &ScanOutput) -> Result<()> {
    let report = ScanReport {
        schema: SCHEMA_VERSION,
        config: cfg,
        environment: Environment::default(),
        summary: &out.summary,
        passed: out.summary.iter().all(|r| r.passed),
        table: &out.table,
        trace: out.trace.as_ref(),
    };
    match cfg.format {
        Format::Json => {
            let mut w = sink(&cfg.out)?;
            w.write_all((serde_json::to_string_pretty(&report)? + "\n").as_bytes())?;
        }
        Format::Csv => {
            table_csv(&out.table.header_refs(), &out.table.rows, sink(&cfg.out)?)?;
            if let Some(p) = &cfg.out {
                let summary = ScanReport { table: &Table { header: vec![], rows: vec![] }, trace: None, ..report };
                std::fs::write(sibling(p, ".summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
                if let Some(t) = &out.trace {
                    table_csv(&t.header_refs(), &t.rows, std::fs::File::create(sibling(p, ".trace.csv"))?)?;
                }
            }
        }
    }
    Ok(())
}

fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::Config(_) | LabError::Io(_) => EXIT_CONFIG,
        _ => EXIT_FAIL,
    }
}

/// Runs the CLI on an argument list and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let (cfg, common) = match config(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(k) = common.jobs {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let start = Instant::now();
    let code = match cfg.command {
        "verify" => {
            let records = verify::run(cfg.suite.unwrap_or(Suite::All), &cfg.check_config());
            for r in &records {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                match (&r.computed, &r.error) {
                    (_, Some(err)) => eprintln!("{tag} {}/{}: {err}", r.suite, r.name),
                    (Some(c), None) => eprintln!("{tag} {}/{}: {c:.12e} vs {}", r.suite, r.name, r.reference.expr),
                    (None, None) => eprintln!("{tag} {}/{}", r.suite, r.name),
                }
            }
            let report = Report::new(cfg.clone(), records);
            let written = match cfg.format {
                Format::Json => report
                    .to_json()
                    .and_then(|s| Ok(sink(&cfg.out)?.write_all(s.as_bytes())?)),
                Format::Csv => sink(&cfg.out).and_then(|w| records_csv(&report.records, w)),
            };
            match written {
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
                Ok(()) if report.passed => EXIT_PASS,
                Ok(()) => EXIT_FAIL,
            }
        }
        _ => {
            let kind = cfg.scan.clone().expect("scan config");
            match scan::run(&kind, cfg.grid, cfg.seed, cfg.tol).and_then(|o| write_scan(&cfg, &o)) {
                Ok(()) => EXIT_PASS,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code(&e)
                }
            }
        }
    };
    if common.timing {
        eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    }
    code
}
