use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minmax-lab")).args(args).output().expect("spawn")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("minmax-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(path: &PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &PathBuf) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn surface_suite_passes_with_schema() {
    let out = tmp("surface.json");
    let o = lab(&["verify", "surface", "--grid", "64", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["schema"], "minmax-lab/report/1");
    assert_eq!(v["passed"], true);
    let recs = v["records"].as_array().unwrap();
    let area = recs.iter().find(|r| r["name"] == "clifford_area").expect("clifford_area record");
    assert_eq!(area["reference"]["expr"], "2*pi^2");
}

#[test]
fn maps_suite_reports_the_profile_failure() {
    let out = tmp("maps.json");
    let o = lab(&["verify", "maps", "--grid", "32", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&out);
    let recs = v["records"].as_array().unwrap();
    let find = |n: &str| recs.iter().find(|r| r["name"] == n).unwrap_or_else(|| panic!("{n}"));
    assert_eq!(find("hopf_energy")["passed"], true);
    assert_eq!(find("hopf_profile_max_deviation")["passed"], false);
}

#[test]
fn same_arguments_give_identical_reports() {
    let out = tmp("repeat.json");
    let args = ["verify", "eigen", "--grid", "32", "--seed", "7", "--out", out.to_str().unwrap()];
    assert_eq!(lab(&args).status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    assert_eq!(lab(&args).status.code(), Some(0));
    assert_eq!(first, std::fs::read(&out).unwrap());
}

#[test]
fn csv_records_format() {
    let out = tmp("surface.csv");
    let o = lab(&["verify", "surface", "--grid", "32", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    assert!(header.contains(&"passed".to_string()) && header.contains(&"computed".to_string()), "{header:?}");
    assert!(r.records().count() > 5);
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["verify", "--grid", "12"][..],
        &["verify", "--tol", "-1"],
        &["verify", "--jobs", "0"],
        &["verify", "nonsense"],
        &["scan", "widths", "--ellipsoid", "1,2"],
        &["scan", "widths", "--manifold", "sphere:3"],
        &["scan", "family", "--surface", "nope"],
        &["verify", "surface", "--grid", "16", "--out", "/nonexistent/dir/r.json"],
    ] {
        assert_eq!(lab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn coarse_grid_is_a_failed_check() {
    let out = tmp("coarse.json");
    let o = lab(&["verify", "ellipsoid", "--grid", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&out);
    let errs: Vec<&str> = v["records"].as_array().unwrap().iter().filter_map(|r| r["error"].as_str()).collect();
    assert!(errs.iter().any(|e| e.contains("coarse")), "{errs:?}");
}

#[test]
fn family_scan_csv() {
    let out = tmp("family.csv");
    let o = lab(&["scan", "family", "--grid", "32", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header[..5], ["a1", "a2", "a3", "a4", "abs_g"]);
    assert!(rows.len() >= 10_000);
    let col = header.iter().position(|h| h == "max_abs_C").unwrap();
    assert!(rows.iter().all(|r| r[col] <= 0.5 + 1e-9));
    let mut summary = out.clone().into_os_string();
    summary.push(".summary.json");
    assert_eq!(json(&summary.into()).pointer("/schema").unwrap(), "minmax-lab/report/1");
}

#[test]
fn pi_profile_scan_decreases() {
    let out = tmp("profile.csv");
    let o = lab(&["scan", "profile", "--map", "pi", "--grid", "128", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["t", "dirichlet_energy", "reduced_integral"]);
    assert!(rows.windows(2).all(|w| w[1][2] < w[0][2]));
}

#[test]
fn eigen_widths_scan_with_trace() {
    let out = tmp("widths.csv");
    let o = lab(&[
        "scan", "widths", "--manifold", "circle:64", "--levels", "3", "--format", "csv", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    let (w, e) = (
        header.iter().position(|h| h == "width").unwrap(),
        header.iter().position(|h| h == "oracle_eigenvalue").unwrap(),
    );
    for r in &rows {
        assert!((r[w] - r[e]).abs() <= 1e-8 * r[e].max(1.0));
    }
    let mut trace = out.into_os_string();
    trace.push(".trace.csv");
    let (th, tr) = csv_rows(&trace.into());
    assert_eq!(th, ["level", "iteration", "max_energy"]);
    assert!(!tr.is_empty());
}
