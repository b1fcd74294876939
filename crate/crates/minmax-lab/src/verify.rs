//! Verification suites: each check becomes a Record with a symbolic reference.

use crate::algebra::{Vec3, Vec4};
use crate::canonical::{family_scan, fields, polar_a_grid, s1_sigma_lift, summarize, MobiusParam};
use crate::error::{LabError, Result};
use crate::grid::{boundary_lift, degree_via_lift, S3Grid, SampledMap};
use crate::minmax::{
    eigen_hierarchy, eigen_nested_family, eigen_oracle, ellipsoid_widths, plane_slice,
    polygon_length, random_rotation, ConstrainedEnergy, CurveEnergy, DiscreteManifold,
    EllipsoidSpec, RayleighEnergy, WidthOptions,
};
use crate::report::{Comparison, Source, Record};
use crate::scan::{neck_ray, neck_records};
use crate::spheremaps::{
    density_field, dirichlet_energy, gl_energy, gl_gradient, mobius_profile,
    monotonicity_certificate, reduced_integral, sample, slice_reduction, GLState, MapKind,
};
use crate::surface::{
    a_functional, area, builtin_surface, gauss_map, geometry,
    lagrangian_jacobian, lagrangian_residual, lagrangian_residual_pair, willmore, SurfaceKind,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use Comparison::*;
use Source::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Surface,
    Canonical,
    Maps,
    Eigen,
    Ellipsoid,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "surface" => Suite::Surface,
            "canonical" => Suite::Canonical,
            "maps" => Suite::Maps,
            "eigen" => Suite::Eigen,
            "ellipsoid" => Suite::Ellipsoid,
            _ => return Err(LabError::Config(format!("unknown suite {s:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Surface => "surface",
            Suite::Canonical => "canonical",
            Suite::Maps => "maps",
            Suite::Eigen => "eigen",
            Suite::Ellipsoid => "ellipsoid",
        }
    }
}

/// Numerical knobs shared by the suites.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CheckConfig {
    /// Surface chart resolution N; S³ grids use N/2, lifts N/8 and N/4.
    pub grid: usize,
    pub seed: u64,
    /// Overrides the pull-tight stopping tolerance of the minmax runs.
    pub tol: Option<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            grid: 128,
            seed: 1,
            tol: None,
        }
    }
}

struct Sink {
    suite: &'static str,
    out: Vec<Record>,
}

impl Sink {
    fn rec(&mut self, name: &str, computed: f64, reference: &str, p: Source, c: Comparison, tol: f64) -> Result<()> {
        self.out.push(Record::check(self.suite, name, computed, reference, p, c, tol)?);
        Ok(())
    }

    /// Runs a group; an error becomes a failed record named after the group.
    fn group(&mut self, name: &str, reference: &str, p: Source, f: impl FnOnce(&mut Sink) -> Result<()>) {
        if let Err(e) = f(self) {
            self.out.push(Record::failed(self.suite, name, reference, p, &e));
        }
    }
}

pub fn run(suite: Suite, cfg: &CheckConfig) -> Vec<Record> {
    let list: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Surface, Suite::Canonical, Suite::Maps, Suite::Eigen, Suite::Ellipsoid],
        s => vec![s],
    };
    let mut out = Vec::new();
    for s in list {
        let mut sink = Sink {
            suite: s.name(),
            out: Vec::new(),
        };
        match s {
            Suite::Surface => surface(cfg, &mut sink),
            Suite::Canonical => canonical(cfg, &mut sink),
            Suite::Maps => maps(cfg, &mut sink),
            Suite::Eigen => eigen(cfg, &mut sink),
            Suite::Ellipsoid => ellipsoid(cfg, &mut sink),
            Suite::All => unreachable!(),
        }
        out.extend(sink.out);
    }
    out
}

fn surface(cfg: &CheckConfig, s: &mut Sink) {
    let n = cfg.grid;
    s.group("clifford_geometry", "2*pi^2", Stated, |s| {
        let imm = builtin_surface(SurfaceKind::Clifford, n)?;
        let geo = geometry(&imm)?;
        s.rec("clifford_area", area(&imm, &geo), "2*pi^2", Stated, Abs, 1e-8)?;
        s.rec("clifford_willmore", willmore(&imm, &geo), "2*pi^2", Stated, Abs, 1e-8)?;
        s.rec("clifford_sup_mean_curvature", geo.sup_mean_curvature(), "0", Trivial, AtMost, 1e-8)?;
        let gm = gauss_map(&imm, &geo)?;
        s.rec("clifford_gauss_degree", gm.degree.raw, "0", Stated, Abs, 1e-6)?;
        s.rec("clifford_a_functional", a_functional(&gm)?, "8*pi^2", Stated, Abs, 1e-4)?;
        s.rec("clifford_lagrangian_residual", lagrangian_residual(&imm, &geo)?, "0", Stated, AtMost, 1e-9)?;
        // negative control: normal turned in the (x₁, x₃) plane by a chart-dependent angle
        let turned: Vec<Vec4> = (0..imm.len())
            .map(|i| {
                let t = 0.3 * imm.grid.coord(i, 0).sin();
                let v = geo.normal[i];
                Vec4::new(t.cos() * v[0] - t.sin() * v[2], v[1], t.sin() * v[0] + t.cos() * v[2], v[3])
            })
            .collect();
        let r = lagrangian_residual_pair(&imm.grid, &imm.phi, &SampledMap::from_vec4(&turned))?;
        s.rec("turned_normal_lagrangian_residual", r, "1e-3", Trivial, Above, 0.0)
    });
    s.group("sphere_geometry", "4*pi", Trivial, |s| {
        let imm = builtin_surface(SurfaceKind::GeodesicSphere { axis: 3 }, n)?;
        let geo = geometry(&imm)?;
        s.rec("sphere_area", area(&imm, &geo), "4*pi", Trivial, Abs, 1e-8)?;
        let gm = gauss_map(&imm, &geo)?;
        s.rec("sphere_gauss_degree", gm.degree.raw, "1", Stated, Abs, 1e-6)?;
        s.rec("sphere_a_functional", a_functional(&gm)?, "16*pi", Stated, Abs, 1e-4)?;
        s.rec("sphere_lagrangian_residual", lagrangian_residual(&imm, &geo)?, "0", Stated, AtMost, 1e-9)
    });
}

fn canonical(cfg: &CheckConfig, s: &mut Sink) {
    let n = cfg.grid;
    s.group("conformal_jacobian", "1", Stated, |s| {
        for (name, kind) in [
            ("sphere", SurfaceKind::GeodesicSphere { axis: 3 }),
            ("clifford", SurfaceKind::Clifford),
        ] {
            let imm = builtin_surface(kind, n)?;
            let geo = geometry(&imm)?;
            let c = lagrangian_jacobian(&gauss_map(&imm, &geo)?)?;
            let defect = c.iter().map(|c| (4.0 * c * c - 1.0).abs()).fold(0.0, f64::max);
            s.rec(&format!("{name}_4c2_defect"), defect, "0", Stated, AtMost, 1e-8)?;
            let f = fields(&imm, &geo, &MobiusParam::new(Vec4::new(0.2, -0.1, 0.3, 0.5))?)?;
            s.rec(&format!("{name}_deformed_max_abs_c"), f.max_abs_c(), "1/2", Stated, AtMost, 1e-9)?;
        }
        Ok(())
    });
    s.group("clifford_family", "8*pi^2", Stated, |s| {
        let imm = builtin_surface(SurfaceKind::Clifford, n)?;
        let geo = geometry(&imm)?;
        let grid = polar_a_grid(10, &S3Grid::new(8, 8, 16), 0.9);
        let sum = summarize(&family_scan(&imm, &geo, &grid)?);
        s.rec("clifford_family_points", sum.count as f64, "10^4", Trivial, AtLeast, 0.0)?;
        s.rec("clifford_family_max", sum.max, "8*pi^2", Stated, AtMost, 1e-4)?;
        let arg = Vec4::from(sum.argmax).norm();
        s.rec("clifford_family_argmax_norm", arg, "0", Stated, Abs, 0.0)?;
        s.rec("clifford_family_max_abs_c", sum.max_abs_c, "1/2", Stated, AtMost, 1e-9)
    });
    s.group("sphere_family", "16*pi", Trivial, |s| {
        let imm = builtin_surface(SurfaceKind::GeodesicSphere { axis: 3 }, n / 2)?;
        let geo = geometry(&imm)?;
        let grid = polar_a_grid(4, &S3Grid::new(8, 8, 8), 0.9);
        let rows = family_scan(&imm, &geo, &grid)?;
        let spread = rows
            .iter()
            .map(|r| (r.a_functional - 16.0 * PI).abs())
            .fold(0.0, f64::max);
        s.rec("sphere_family_a_functional_spread", spread, "0", Trivial, AtMost, 1e-4)?;
        s.rec("sphere_family_max_abs_c", summarize(&rows).max_abs_c, "1/2", Stated, AtMost, 1e-9)
    });
    s.group("polarization_degrees", "2", Stated, |s| {
        let s3 = S3Grid::uniform(n / 8);
        let d = degree_via_lift(&s3.grid, &boundary_lift(&s3))?;
        s.rec("boundary_lift_degree", d.raw, "2", Stated, Abs, 1e-6)?;
        for (name, kind, want) in [
            ("sphere", SurfaceKind::GeodesicSphere { axis: 3 }, "2"),
            ("clifford", SurfaceKind::Clifford, "0"),
        ] {
            let imm = builtin_surface(kind, n / 4)?;
            let d = s1_sigma_lift(&imm, &geometry(&imm)?, n / 4)?;
            s.rec(&format!("{name}_polarization_degree"), d.oriented.raw, want, Stated, Abs, 1e-6)?;
        }
        Ok(())
    });
    s.group("neck_and_bubble", "3*0.1^2", Stated, |s| {
        let imm = builtin_surface(SurfaceKind::Clifford, n)?;
        let rows = neck_ray(&imm, SurfaceKind::Clifford, &[1e-2, 1e-3, 1e-4], 2 * n)?;
        s.out.extend(neck_records(s.suite, &rows)?);
        Ok(())
    });
}

fn maps(cfg: &CheckConfig, s: &mut Sink) {
    let ns = cfg.grid / 2;
    s.group("hopf_energy", "16*pi^2", Stated, |s| {
        let g = S3Grid::uniform(ns);
        s.rec("hopf_energy", dirichlet_energy(&MapKind::Hopf, &g)?, "16*pi^2", Stated, Abs, 1e-6)?;
        let defect = density_field(&MapKind::Hopf, &g)
            .iter()
            .map(|d| (d - 8.0).abs())
            .fold(0.0, f64::max);
        s.rec("hopf_density_defect", defect, "0", Stated, AtMost, 1e-10)?;
        let e = |b: Vec3| dirichlet_energy(&MapKind::Vb { b }, &g);
        let base = e(Vec3::x())?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut spread: f64 = 0.0;
        for _ in 0..10 {
            let b = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            spread = spread.max((e(b.normalize())? - base).abs());
        }
        s.rec("vb_rotation_spread", spread, "0", Oracle, AtMost, 1e-8)
    });
    s.group("pi_energy", "8*pi^2", Stated, |s| {
        let g = S3Grid::uniform(ns);
        s.rec("pi_energy", dirichlet_energy(&MapKind::PiProjection, &g)?, "8*pi^2", Stated, Abs, 1e-3)?;
        s.rec("pi_reduced_energy", reduced_integral(0.0), "8*pi^2", Stated, Abs, 1e-8)?;
        let defect = g
            .points()
            .iter()
            .map(|z| (MapKind::PiProjection.density(z) * (1.0 - z[3] * z[3]) - 2.0).abs())
            .fold(0.0, f64::max);
        s.rec("pi_conformal_identity", defect, "0", Stated, AtMost, 1e-8)
    });
    s.group("hopf_profile", "16*pi^2", Stated, |s| {
        let g = S3Grid::uniform(ns);
        let a: Vec<Vec4> = [0.0, 0.3, 0.6, 0.9].iter().map(|r| Vec4::new(*r, 0.0, 0.0, 0.0)).collect();
        let rows = mobius_profile(&MapKind::Hopf, &a, &g)?;
        let dev = rows
            .iter()
            .map(|r| (r.energy - 16.0 * PI * PI).abs())
            .fold(0.0, f64::max);
        s.rec("hopf_profile_max_deviation", dev, "0", Stated, AtMost, 1e-4)
    });
    s.group("pi_profile", "8*pi^2", Stated, |s| {
        let g = S3Grid::uniform(ns);
        let ts = [0.0, 0.25, 0.5, 0.75];
        let a: Vec<Vec4> = ts.iter().map(|t| Vec4::new(*t, 0.0, 0.0, 0.0)).collect();
        let rows = mobius_profile(&MapKind::PiProjection, &a, &g)?;
        let drop = rows.windows(2).map(|w| w[0].energy - w[1].energy).fold(f64::INFINITY, f64::min);
        s.rec("pi_profile_min_decrease", drop, "0", Stated, Above, 0.0)?;
        s.rec("pi_profile_at_zero", rows[0].energy, "8*pi^2", Stated, Abs, 1e-3)?;
        let mut worst: f64 = 0.0;
        for (t, r) in ts.iter().zip(&rows) {
            let red = reduced_integral(*t);
            let sl = slice_reduction(*t, 128);
            worst = worst.max((r.energy - red).abs()).max((r.energy - sl).abs()).max((red - sl).abs());
        }
        s.rec("pi_profile_three_way_spread", worst, "0", Oracle, AtMost, 2e-3)?;
        let scan: Vec<f64> = (0..20).map(|i| reduced_integral(0.05 * i as f64)).collect();
        let drop = scan.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        s.rec("reduced_profile_min_decrease", drop, "0", Oracle, Above, 0.0)?;
        let a_grid: Vec<f64> = (0..200).map(|i| 1.01 * (50.0f64 / 1.01).powf(i as f64 / 199.0)).collect();
        let cert = monotonicity_certificate(0.5, &a_grid);
        s.rec("monotonicity_min_f_slope", cert.min_f_slope, "0", Stated, AtLeast, 1e-10)?;
        s.rec("monotonicity_f_far", cert.f_far, "2*0.5", Stated, Abs, 1e-6)?;
        s.rec("monotonicity_g_at_one", cert.g_at_one, "ln(3)", Stated, Abs, 1e-12)
    });
    s.group("gl_gradient", "0", Oracle, |s| {
        let g16 = S3Grid::uniform(16);
        let h = sample(&MapKind::Hopf, &g16);
        let e = gl_energy(&GLState::new(h, 0.3)?, &g16)?;
        let g = S3Grid::uniform(10);
        s.rec("gl_hopf_energy", e, "8*pi^2", Trivial, Abs, 1e-8)?;
        let z = SampledMap::new(3, vec![0.0; 3 * g.len()]);
        let e = gl_energy(&GLState::new(z, 0.5)?, &g)?;
        s.rec("gl_zero_energy", e, "2*pi^2/(2*0.5^2)", Trivial, Abs, 1e-9)?;
        s.rec("gl_gradient_fd_error", gl_fd_error(&g, cfg.seed)?, "0", Oracle, AtMost, 1e-5)
    });
}

/// Largest relative mismatch between ⟨∇E_ε, v⟩ and central differences over 10 random
/// smooth directions.
pub fn gl_fd_error(g: &S3Grid, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = |rng: &mut ChaCha8Rng| {
        let c: Vec<f64> = (0..24).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<Vec3> = g
            .points()
            .iter()
            .map(|z| {
                Vec3::from_fn(|j, _| {
                    let b = &c[8 * j..8 * j + 8];
                    b[0] + b[1] * z[0] + b[2] * z[1] + b[3] * z[2] + b[4] * z[3]
                        + b[5] * z[0] * z[1] + b[6] * z[2] * z[3] + b[7] * z[1] * z[1]
                })
            })
            .collect();
        SampledMap::from_vec3(&v)
    };
    let eps = 0.4;
    let u = field(&mut rng);
    let grad = gl_gradient(&GLState::new(u.clone(), eps)?, g)?;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let v = field(&mut rng);
        let pair = g.integrate(&(0..g.len()).map(|i| grad.vec3(i).dot(&v.vec3(i))).collect::<Vec<_>>());
        let h = 1e-5;
        let shifted = |t: f64| -> Result<f64> {
            let d: Vec<f64> = u.data.iter().zip(&v.data).map(|(a, b)| a + t * b).collect();
            gl_energy(&GLState::new(SampledMap::new(3, d), eps)?, g)
        };
        let fd = (shifted(h)? - shifted(-h)?) / (2.0 * h);
        worst = worst.max((fd - pair).abs() / pair.abs().max(1.0));
    }
    Ok(worst)
}

/// Exact numeric literal for a computed reference value.
fn literal(v: f64) -> String {
    format!("{v:e}")
}

fn eigen(cfg: &CheckConfig, s: &mut Sink) {
    let n = cfg.grid;
    let levels = 3;
    s.group("eigen_hierarchy", "oracle", Oracle, |s| {
        let manifold = DiscreteManifold::Circle { n };
        let e = RayleighEnergy::new(manifold)?;
        let oracle = eigen_oracle(&e, levels + 1);
        let mut opts = WidthOptions::default();
        if let Some(t) = cfg.tol {
            opts.pull_tol = t;
        }
        let h = eigen_hierarchy(manifold, levels, 9, cfg.seed, &opts)?;
        let mut below = 0;
        for (lev, o) in h.iter().zip(&oracle) {
            let k = lev.level;
            let w = lev.report.critical_value;
            let closed = format!("({n}/pi)^2*sin(pi*{}/{n})^2", k - 1);
            s.rec(&format!("level{k}_oracle_closed_form"), o.value, &closed, Oracle, Abs, 1e-9 * o.value.max(1.0))?;
            s.rec(&format!("level{k}_width"), w, &literal(o.value), Oracle, Abs, 1e-6 * o.value.abs().max(1.0))?;
            s.rec(&format!("level{k}_multiplicity"), lev.space.multiplicity() as f64, &o.multiplicity().to_string(), Oracle, Abs, 0.0)?;
            s.rec(&format!("level{k}_morse_index_bound"), lev.report.morse_index as f64, &lev.cumulative_multiplicity.to_string(), Stated, AtMost, 0.0)?;
            s.rec(&format!("level{k}_morse_index"), lev.report.morse_index as f64, &below.to_string(), Oracle, Abs, 0.0)?;
            s.rec(&format!("level{k}_deformation_violations"), lev.report.violations as f64, "0", Stated, AtMost, 0.0)?;
            below += o.multiplicity();
        }
        let gap = h
            .windows(2)
            .map(|w| w[1].report.critical_value - w[0].report.critical_value)
            .fold(f64::INFINITY, f64::min);
        s.rec("width_min_increase", gap, "0", Stated, Above, 0.0)?;
        // explicit nested family of the top level
        let spaces = &oracle[..levels];
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let t: Vec<f64> = (0..levels - 1).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let rots: Vec<DMatrix<f64>> = spaces[1..levels - 1]
                .iter()
                .map(|sp| random_rotation(sp.multiplicity(), &mut rng))
                .collect();
            worst = worst.max(e.energy(&eigen_nested_family(&e, spaces, &t, &rots)?));
        }
        s.rec("nested_family_max", worst, &literal(spaces[levels - 1].value), Stated, AtMost, 1e-12)
    });
}

fn ellipsoid(cfg: &CheckConfig, s: &mut Sink) {
    let m = cfg.grid;
    let mut opts = WidthOptions {
        pull_tol: 1e-8,
        polish_tol: 1e-10,
        max_iter: 100,
    };
    if let Some(t) = cfg.tol {
        opts.pull_tol = t;
    }
    s.group("ellipsoid_widths", "perimeter(1,1.2)", Oracle, |s| {
        let spec = EllipsoidSpec::new(1.0, 1.2, 1.5)?;
        let w = ellipsoid_widths(&spec, 17, m, &opts)?;
        for (lev, r) in w.iter().zip(["perimeter(1,1.2)", "perimeter(1,1.5)", "perimeter(1.2,1.5)"]) {
            s.rec(&format!("w{}", lev.level), lev.width, r, Oracle, Rel, 5e-3)?;
            s.rec(&format!("level{}_deformation_violations", lev.level), lev.report.violations as f64, "0", Stated, AtMost, 0.0)?;
        }
        let gap = w.windows(2).map(|p| p[1].width - p[0].width).fold(f64::INFINITY, f64::min);
        s.rec("width_min_increase", gap, "0", Stated, Above, 0.0)
    });
    s.group("sphere_widths", "2*pi", Trivial, |s| {
        let spec = EllipsoidSpec::new(1.0, 1.0, 1.0)?;
        let w = ellipsoid_widths(&spec, 17, 64, &opts)?;
        let tie = w.iter().map(|l| (l.width - w[0].width).abs()).fold(0.0, f64::max);
        s.rec("sphere_width_tie", tie, "0", Trivial, AtMost, 1e-9)?;
        s.rec("sphere_width", w[0].width, "2*pi", Trivial, Rel, 1e-3)
    });
    s.group("slice_energy_length", "0", Trivial, |s| {
        let spec = EllipsoidSpec::new(1.0, 1.2, 1.5)?;
        let e = CurveEnergy::new(spec, m)?;
        let c = plane_slice(&spec, &Vec3::new(0.3, 0.4, 0.8), 0.4, m);
        s.rec("slice_energy_vs_length", (e.energy(&c).sqrt() - polygon_length(&c)).abs(), "0", Trivial, AtMost, 1e-8)
    });
}
