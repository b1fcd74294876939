//! Plot-ready scans: Moebius family, neck ray, energy profiles and widths.

use crate::algebra::Vec4;
use crate::canonical::{
    bubble_angle, bubble_coords, bubble_limit, family_scan, neck_decomposition, polar_a_grid,
    rescaled_gauss, summarize,
};
use crate::error::{LabError, Result};
use crate::grid::S3Grid;
use crate::minmax::{
    eigen_hierarchy, eigen_oracle, ellipsoid_widths, DiscreteManifold, EllipsoidSpec,
    MinmaxReport, RayleighEnergy, WidthOptions,
};
use crate::report::{Comparison, Source, Record};
use crate::spheremaps::{mobius_profile, reduced_integral, MapKind};
use crate::surface::{builtin_surface, frame_from_jet, geometry, DiscreteImmersion, SurfaceKind};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn header_refs(&self) -> Vec<&str> {
        self.header.iter().map(String::as_str).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanOutput {
    pub table: Table,
    /// Per-iteration max energy of the pull-tight loops (widths scans only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Table>,
    pub summary: Vec<Record>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanKind {
    Family { surface: SurfaceKind },
    Neck,
    Profile { map: MapKind },
    EllipsoidWidths { spec: EllipsoidSpec, samples: usize },
    EigenWidths { manifold: DiscreteManifold, levels: usize },
}

fn rec(name: &str, c: f64, r: &str, p: Source, cmp: Comparison, tol: f64) -> Result<Record> {
    Record::check("scan", name, c, r, p, cmp, tol)
}

pub fn run(kind: &ScanKind, grid: usize, seed: u64, tol: Option<f64>) -> Result<ScanOutput> {
    match kind {
        ScanKind::Family { surface } => family(*surface, grid),
        ScanKind::Neck => neck(grid),
        ScanKind::Profile { map } => profile(map, grid),
        ScanKind::EllipsoidWidths { spec, samples } => ellipsoid(spec, *samples, grid, tol),
        ScanKind::EigenWidths { manifold, levels } => eigen(*manifold, *levels, seed, tol),
    }
}

fn family(surface: SurfaceKind, n: usize) -> Result<ScanOutput> {
    let imm = builtin_surface(surface, n)?;
    let geo = geometry(&imm)?;
    let rows = family_scan(&imm, &geo, &polar_a_grid(10, &S3Grid::new(8, 8, 16), 0.9))?;
    let mut table = Table::new(&[
        "a1", "a2", "a3", "a4", "abs_g", "gauss_area", "gauss_degree", "A_functional", "min_4C2", "max_abs_C",
    ]);
    for r in &rows {
        table.rows.push(vec![
            r.a[0], r.a[1], r.a[2], r.a[3], r.g_norm, r.area_gauss, r.degree, r.a_functional, r.min_4c2, r.max_abs_c,
        ]);
    }
    let s = summarize(&rows);
    let reference = match surface {
        SurfaceKind::Clifford => "8*pi^2",
        _ => "16*pi",
    };
    let summary = vec![
        rec("family_max", s.max, reference, Source::Stated, Comparison::AtMost, 1e-4)?,
        rec("family_argmax_norm", Vec4::from(s.argmax).norm(), "0", Source::Stated, Comparison::Abs, 0.0)?,
        rec("family_max_abs_c", s.max_abs_c, "1/2", Source::Stated, Comparison::AtMost, 1e-9)?,
    ];
    Ok(ScanOutput { table, trace: None, summary })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NeckRow {
    pub one_minus_abs_g: f64,
    pub d_g: f64,
    pub bubble_area: f64,
    pub neck_area: f64,
    pub bad_area: f64,
    pub total_area: f64,
    /// sup over probe points of the distance between rescaled Gauss map and bubble limit.
    pub bubble_error: f64,
}

/// g = −(1−ε)Φ(1, 2) for ε ∈ eps, η = δ = 0.1, fine grid 2N.
pub fn neck_ray(imm: &DiscreteImmersion, kind: SurfaceKind, eps: &[f64], n_fine: usize) -> Result<Vec<NeckRow>> {
    let f = frame_from_jet(&kind.eval(1.0, 2.0), imm.orientation);
    let probes = [[0.5, 0.2], [-1.0, 0.7], [0.0, 0.0]];
    eps.iter()
        .map(|e| {
            let g = -(1.0 - e) * f.phi;
            let na = neck_decomposition(imm, &g, 0.1, 0.1, n_fine)?;
            let bc = bubble_coords(imm, &g)?;
            let alpha = bubble_angle(&bc);
            let mut err: f64 = 0.0;
            for x in probes {
                err = err.max(rescaled_gauss(imm, &g, &bc, x)?.dist(&bubble_limit(alpha, &bc.frame, x)));
            }
            Ok(NeckRow {
                one_minus_abs_g: *e,
                d_g: na.d,
                bubble_area: na.bubble_area,
                neck_area: na.neck_area,
                bad_area: na.bad_area,
                total_area: na.total_area,
                bubble_error: err,
            })
        })
        .collect()
}

/// Records for a neck ray: bad-set area decreasing, neck area ≤ 3η² + 10%, bubble error
/// dropping ≥ 3× per step.
pub fn neck_records(suite: &str, rows: &[NeckRow]) -> Result<Vec<Record>> {
    let drop = rows.windows(2).map(|w| w[0].bad_area - w[1].bad_area).fold(f64::INFINITY, f64::min);
    let neck = rows.iter().map(|r| r.neck_area).fold(0.0, f64::max);
    let ratio = rows
        .windows(2)
        .map(|w| w[0].bubble_error / w[1].bubble_error)
        .fold(f64::INFINITY, f64::min);
    Ok(vec![
        Record::check(suite, "bad_area_min_decrease", drop, "0", Source::Stated, Comparison::Above, 0.0)?,
        Record::check(suite, "neck_area_max", neck, "1.1*3*0.1^2", Source::Stated, Comparison::AtMost, 0.0)?,
        Record::check(suite, "bubble_error_min_ratio", ratio, "3", Source::Stated, Comparison::AtLeast, 0.0)?,
    ])
}

fn neck(n: usize) -> Result<ScanOutput> {
    let imm = builtin_surface(SurfaceKind::Clifford, n)?;
    let rows = neck_ray(&imm, SurfaceKind::Clifford, &[1e-2, 1e-3, 1e-4], 2 * n)?;
    let mut table = Table::new(&[
        "one_minus_abs_g", "d_g", "bubble_area", "neck_area", "bad_area", "gauss_area", "bubble_sup_error",
    ]);
    for r in &rows {
        table.rows.push(vec![
            r.one_minus_abs_g, r.d_g, r.bubble_area, r.neck_area, r.bad_area, r.total_area, r.bubble_error,
        ]);
    }
    Ok(ScanOutput {
        table,
        trace: None,
        summary: neck_records("scan", &rows)?,
    })
}

fn profile(map: &MapKind, n: usize) -> Result<ScanOutput> {
    let g = S3Grid::uniform(n / 2);
    let ts: Vec<f64> = (0..19).map(|i| 0.05 * i as f64).collect();
    let a: Vec<Vec4> = ts.iter().map(|t| Vec4::new(*t, 0.0, 0.0, 0.0)).collect();
    let rows = mobius_profile(map, &a, &g)?;
    let pi = matches!(map, MapKind::PiProjection);
    let mut table = if pi {
        Table::new(&["t", "dirichlet_energy", "reduced_integral"])
    } else {
        Table::new(&["t", "dirichlet_energy"])
    };
    for (t, r) in ts.iter().zip(&rows) {
        let mut row = vec![*t, r.energy];
        if pi {
            row.push(reduced_integral(*t));
        }
        table.rows.push(row);
    }
    let mut summary = Vec::new();
    if pi {
        let drop = rows.windows(2).map(|w| w[0].energy - w[1].energy).fold(f64::INFINITY, f64::min);
        summary.push(rec("profile_min_decrease", drop, "0", Source::Stated, Comparison::Above, 0.0)?);
        summary.push(rec("profile_at_zero", rows[0].energy, "8*pi^2", Source::Stated, Comparison::Abs, 1e-3)?);
    } else if matches!(map, MapKind::Hopf) {
        summary.push(rec("profile_at_zero", rows[0].energy, "16*pi^2", Source::Stated, Comparison::Abs, 1e-6)?);
    }
    Ok(ScanOutput { table, trace: None, summary })
}

fn trace_table(reports: &[(usize, &MinmaxReport)]) -> Table {
    let mut t = Table::new(&["level", "iteration", "max_energy"]);
    for (level, r) in reports {
        for (it, m) in &r.trace {
            t.rows.push(vec![*level as f64, *it as f64, *m]);
        }
    }
    t
}

fn ellipsoid(spec: &EllipsoidSpec, samples: usize, m: usize, tol: Option<f64>) -> Result<ScanOutput> {
    let opts = WidthOptions {
        pull_tol: tol.unwrap_or(1e-8),
        polish_tol: 1e-10,
        max_iter: 100,
    };
    let w = ellipsoid_widths(spec, samples, m, &opts)?;
    let mut table = Table::new(&[
        "level", "width", "perimeter_oracle", "rel_error", "sweep_max", "morse_index", "nullity",
        "iterations", "accepted_steps", "violations", "worst_ratio",
    ]);
    let mut summary = Vec::new();
    let pairs = [(spec.a, spec.b), (spec.a, spec.c), (spec.b, spec.c)];
    for (l, (p, q)) in w.iter().zip(pairs) {
        let r = &l.report;
        table.rows.push(vec![
            l.level as f64,
            l.width,
            l.oracle,
            (l.width - l.oracle).abs() / l.oracle,
            l.sweep_max,
            r.morse_index as f64,
            r.nullity as f64,
            r.iterations as f64,
            r.accepted_steps as f64,
            r.violations as f64,
            r.worst_ratio,
        ]);
        summary.push(rec(
            &format!("w{}", l.level),
            l.width,
            &format!("perimeter({p},{q})"),
            Source::Oracle,
            Comparison::Rel,
            5e-3,
        )?);
    }
    let trace = trace_table(&w.iter().map(|l| (l.level, &l.report)).collect::<Vec<_>>());
    Ok(ScanOutput {
        table,
        trace: Some(trace),
        summary,
    })
}

fn eigen(manifold: DiscreteManifold, levels: usize, seed: u64, tol: Option<f64>) -> Result<ScanOutput> {
    let mut opts = WidthOptions::default();
    if let Some(t) = tol {
        opts.pull_tol = t;
    }
    let e = RayleighEnergy::new(manifold)?;
    let oracle = eigen_oracle(&e, levels);
    let h = eigen_hierarchy(manifold, levels, 9, seed, &opts)?;
    if oracle.len() < h.len() {
        return Err(LabError::BadLevel(levels));
    }
    let mut table = Table::new(&[
        "level", "width", "oracle_eigenvalue", "rel_error", "multiplicity", "oracle_multiplicity",
        "morse_index", "cumulative_multiplicity", "iterations", "accepted_steps", "violations", "worst_ratio",
    ]);
    let mut summary = Vec::new();
    for (l, o) in h.iter().zip(&oracle) {
        let r = &l.report;
        table.rows.push(vec![
            l.level as f64,
            r.critical_value,
            o.value,
            (r.critical_value - o.value).abs() / o.value.abs().max(1.0),
            l.space.multiplicity() as f64,
            o.multiplicity() as f64,
            r.morse_index as f64,
            l.cumulative_multiplicity as f64,
            r.iterations as f64,
            r.accepted_steps as f64,
            r.violations as f64,
            r.worst_ratio,
        ]);
        summary.push(rec(
            &format!("level{}_width", l.level),
            r.critical_value,
            &format!("{:e}", o.value),
            Source::Oracle,
            Comparison::Abs,
            1e-6 * o.value.abs().max(1.0),
        )?);
    }
    let trace = trace_table(&h.iter().map(|l| (l.level, &l.report)).collect::<Vec<_>>());
    Ok(ScanOutput {
        table,
        trace: Some(trace),
        summary,
    })
}
