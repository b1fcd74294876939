//! Rayleigh quotient of a discrete Laplacian on the mass sphere {uᵀMu = 1} and the
//! level-by-level eigenvalue hierarchy.

use super::{complement_basis, pinv_solve, width, ConstrainedEnergy, IndexReport, MinmaxReport, Sweepout, WidthOptions};
use crate::error::{LabError, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscreteManifold {
    /// N nodes on a circle of length 2π.
    Circle { n: usize },
    /// N×N nodes on the square torus of side 2π.
    FlatTorus { n: usize },
}

impl DiscreteManifold {
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, n) = s
            .split_once(':')
            .ok_or_else(|| LabError::Config(format!("expected kind:n, got {s:?}")))?;
        let n: usize = n
            .parse()
            .map_err(|_| LabError::Config(format!("bad size in {s:?}")))?;
        match kind {
            "circle" => Ok(DiscreteManifold::Circle { n }),
            "torus" | "flat_torus" => Ok(DiscreteManifold::FlatTorus { n }),
            _ => Err(LabError::Config(format!("unknown manifold {kind:?}"))),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DiscreteManifold::Circle { n } => *n,
            DiscreteManifold::FlatTorus { n } => n * n,
        }
    }

    pub fn spacing(&self) -> f64 {
        match self {
            DiscreteManifold::Circle { n } | DiscreteManifold::FlatTorus { n } => 2.0 * PI / *n as f64,
        }
    }

    /// M = mass·I: h on the circle, h² on the torus.
    pub fn mass(&self) -> f64 {
        match self {
            DiscreteManifold::Circle { .. } => self.spacing(),
            DiscreteManifold::FlatTorus { .. } => self.spacing().powi(2),
        }
    }

    /// K with uᵀKu the forward-difference Dirichlet energy.
    pub fn stiffness(&self) -> DMatrix<f64> {
        match *self {
            DiscreteManifold::Circle { n } => {
                let h = self.spacing();
                let mut k = DMatrix::zeros(n, n);
                for i in 0..n {
                    let j = (i + 1) % n;
                    k[(i, i)] += 1.0 / h;
                    k[(j, j)] += 1.0 / h;
                    k[(i, j)] -= 1.0 / h;
                    k[(j, i)] -= 1.0 / h;
                }
                k
            }
            DiscreteManifold::FlatTorus { n } => {
                let mut k = DMatrix::zeros(n * n, n * n);
                let id = |i: usize, j: usize| (i % n) * n + (j % n);
                for i in 0..n {
                    for j in 0..n {
                        for (a, b) in [(id(i, j), id(i + 1, j)), (id(i, j), id(i, j + 1))] {
                            k[(a, a)] += 1.0;
                            k[(b, b)] += 1.0;
                            k[(a, b)] -= 1.0;
                            k[(b, a)] -= 1.0;
                        }
                    }
                }
                k
            }
        }
    }

    /// Random combination of low Fourier modes with decaying amplitudes.
    pub fn random_smooth(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        const MODES: usize = 6;
        match *self {
            DiscreteManifold::Circle { n } => {
                let c: Vec<(f64, f64)> = (0..=MODES)
                    .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                DVector::from_fn(n, |i, _| {
                    let x = self.spacing() * i as f64;
                    c.iter()
                        .enumerate()
                        .map(|(j, (a, b))| (a * (j as f64 * x).cos() + b * (j as f64 * x).sin()) / (1.0 + j as f64))
                        .sum()
                })
            }
            DiscreteManifold::FlatTorus { n } => {
                let m = 3;
                let c: Vec<f64> = (0..4 * (m + 1) * (m + 1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
                DVector::from_fn(n * n, |idx, _| {
                    let (i, j) = (idx / n, idx % n);
                    let (x, y) = (self.spacing() * i as f64, self.spacing() * j as f64);
                    let mut s = 0.0;
                    for p in 0..=m {
                        for q in 0..=m {
                            let b = 4 * (p * (m + 1) + q);
                            let (px, py) = (p as f64 * x, q as f64 * y);
                            let amp = 1.0 / (1.0 + (p + q) as f64);
                            s += amp
                                * (c[b] * px.cos() * py.cos()
                                    + c[b + 1] * px.cos() * py.sin()
                                    + c[b + 2] * px.sin() * py.cos()
                                    + c[b + 3] * px.sin() * py.sin());
                        }
                    }
                    s
                })
            }
        }
    }
}

/// R(u) = uᵀKu / uᵀMu on {uᵀMu = 1}, deformed in the H¹ metric P = K + M.
/// An optional deflation basis Z restricts velocities to be M-orthogonal to Z.
#[derive(Clone, Debug)]
pub struct RayleighEnergy {
    pub manifold: DiscreteManifold,
    pub k: DMatrix<f64>,
    pub mass: f64,
    p: DMatrix<f64>,
    p_chol: Cholesky<f64, Dyn>,
    deflate: Option<DMatrix<f64>>,
}

impl RayleighEnergy {
    pub fn new(manifold: DiscreteManifold) -> Result<Self> {
        let min = match manifold {
            DiscreteManifold::Circle { .. } => 8,
            DiscreteManifold::FlatTorus { .. } => 4,
        };
        let n = match manifold {
            DiscreteManifold::Circle { n } | DiscreteManifold::FlatTorus { n } => n,
        };
        if n < min {
            return Err(LabError::GridTooCoarse(format!("{n} nodes per axis, need {min}")));
        }
        let k = manifold.stiffness();
        let mass = manifold.mass();
        let p = &k + DMatrix::identity(k.nrows(), k.ncols()) * mass;
        let p_chol = p
            .clone()
            .cholesky()
            .ok_or_else(|| LabError::BadParameter("H1 metric not positive".into()))?;
        Ok(RayleighEnergy {
            manifold,
            k,
            mass,
            p,
            p_chol,
            deflate: None,
        })
    }

    /// Copy whose deformation field is M-orthogonal to the columns of z.
    pub fn deflated(&self, z: DMatrix<f64>) -> Self {
        let mut out = self.clone();
        out.deflate = if z.ncols() == 0 { None } else { Some(z) };
        out
    }

    pub fn m_dot(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.mass * a.dot(b)
    }

    pub fn normalize(&self, u: &DVector<f64>) -> DVector<f64> {
        u / self.m_dot(u, u).sqrt()
    }

    /// P-orthogonal projection of P⁻¹grad off the normals Mx and MZ.
    fn project(&self, x: &DVector<f64>, grad: &DVector<f64>, deflate: Option<&DMatrix<f64>>) -> DVector<f64> {
        let gr = self.p_chol.solve(grad);
        let extra = deflate.map_or(0, |z| z.ncols());
        let mut c = DMatrix::zeros(x.len(), 1 + extra);
        c.set_column(0, &(x * self.mass));
        if let Some(z) = deflate {
            c.columns_mut(1, extra).copy_from(&(z * self.mass));
        }
        let n = self.p_chol.solve(&c);
        let a = c.transpose() * &n;
        let rhs = c.transpose() * &gr;
        let coef = a.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(1 + extra));
        gr - n * coef
    }
}

impl ConstrainedEnergy for RayleighEnergy {
    fn dim(&self) -> usize {
        self.k.nrows()
    }

    fn energy(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.k * x)) / self.m_dot(x, x)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mm = self.m_dot(x, x);
        let kx = &self.k * x;
        let r = x.dot(&kx) / mm;
        (kx - x * (r * self.mass)) * (2.0 / mm)
    }

    fn tangent_gradient(&self, x: &DVector<f64>, grad: &DVector<f64>) -> DVector<f64> {
        self.project(x, grad, self.deflate.as_ref())
    }

    fn metric_norm(&self, _x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.p * v)).max(0.0).sqrt()
    }

    fn retract(&self, x: &DVector<f64>) -> DVector<f64> {
        self.normalize(x)
    }

    fn constraint_residual(&self, x: &DVector<f64>) -> f64 {
        (self.m_dot(x, x) - 1.0).abs()
    }

    fn lagrangian_hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let r = self.energy(x);
        (&self.k - DMatrix::identity(x.len(), x.len()) * (r * self.mass)) * 2.0
    }

    fn tangent_basis(&self, x: &DVector<f64>) -> DMatrix<f64> {
        complement_basis(x)
    }

    fn index_gram(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        t.transpose() * t * self.mass
    }

    fn polish(&self, x: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
        let n = x.len();
        let mut u = self.normalize(x);
        let mut lam = self.energy(&u);
        for _ in 0..30 {
            if full_grad_norm(self, &u) < tol {
                return Ok(u);
            }
            let mut j = DMatrix::zeros(n + 1, n + 1);
            j.view_mut((0, 0), (n, n))
                .copy_from(&((&self.k - DMatrix::identity(n, n) * (lam * self.mass)) * 2.0));
            for i in 0..n {
                j[(i, n)] = -2.0 * self.mass * u[i];
                j[(n, i)] = 2.0 * self.mass * u[i];
            }
            let mut r = DVector::zeros(n + 1);
            r.rows_mut(0, n)
                .copy_from(&((&self.k * &u - &u * (lam * self.mass)) * 2.0));
            r[n] = self.m_dot(&u, &u) - 1.0;
            let d = pinv_solve(j, &r, 1e-10);
            u += d.rows(0, n);
            lam += d[n];
            u = self.normalize(&u);
        }
        let g = full_grad_norm(self, &u);
        if g < tol {
            Ok(u)
        } else {
            Err(LabError::NoConvergence { iterations: 30, grad: g })
        }
    }
}

fn full_grad_norm(e: &RayleighEnergy, u: &DVector<f64>) -> f64 {
    let g = e.gradient(u);
    g.dot(&e.project(u, &g, None)).max(0.0).sqrt()
}

/// M-orthonormal basis of one eigenspace.
#[derive(Clone, Debug, Serialize)]
pub struct EigenSpace {
    pub value: f64,
    #[serde(skip)]
    pub basis: DMatrix<f64>,
}

impl EigenSpace {
    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }
}

/// Distinct eigenvalues of M⁻¹K in ascending order, grouped with relative tolerance 1e-8,
/// with M-orthonormal eigenvectors. Dense symmetric eigensolver.
pub fn eigen_oracle(e: &RayleighEnergy, count: usize) -> Vec<EigenSpace> {
    let eig = SymmetricEigen::new(&e.k / e.mass);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let mut out: Vec<EigenSpace> = Vec::new();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    let mut current = f64::NAN;
    for i in order {
        let v = eig.eigenvalues[i];
        if !cols.is_empty() && (v - current).abs() > 1e-8 * current.abs().max(1.0) {
            out.push(EigenSpace {
                value: current,
                basis: DMatrix::from_columns(&cols),
            });
            cols.clear();
            if out.len() == count {
                return out;
            }
        }
        if cols.is_empty() {
            current = v;
        }
        cols.push(eig.eigenvectors.column(i) / e.mass.sqrt());
    }
    if !cols.is_empty() && out.len() < count {
        out.push(EigenSpace {
            value: current,
            basis: DMatrix::from_columns(&cols),
        });
    }
    out
}

/// cos(πt_k/2) top + sin(πt_k/2)(cos(πt_{k−1}/2) v_{k−1} + sin(πt_{k−1}/2)(… v₁)).
/// `lower` = v₁..v_{k−1}, `t` = t₂..t_k.
pub fn nested(top: &DVector<f64>, lower: &[DVector<f64>], t: &[f64]) -> DVector<f64> {
    assert_eq!(lower.len(), t.len());
    if lower.is_empty() {
        return top.clone();
    }
    let mut v = lower[0].clone();
    for l in 1..lower.len() {
        let a = 0.5 * PI * t[l - 1];
        v = &lower[l] * a.cos() + v * a.sin();
    }
    let a = 0.5 * PI * t[t.len() - 1];
    top * a.cos() + v * a.sin()
}

/// Nested family built from the eigenspaces F₁..F_k: u_k, R_l u_l (l = 2..k−1), u₁,
/// where u_l is the first basis vector of F_l and R_l acts on F_l coordinates.
pub fn eigen_nested_family(
    e: &RayleighEnergy,
    spaces: &[EigenSpace],
    t: &[f64],
    rotations: &[DMatrix<f64>],
) -> Result<DVector<f64>> {
    let k = spaces.len();
    if k == 0 || t.len() + 1 != k || rotations.len() + 2 != k.max(2) {
        return Err(LabError::BadEigenbasis(format!(
            "{k} spaces, {} parameters, {} rotations",
            t.len(),
            rotations.len()
        )));
    }
    for (a, sa) in spaces.iter().enumerate() {
        for sb in &spaces[a..] {
            let g = sa.basis.transpose() * &sb.basis * e.mass;
            let target = if std::ptr::eq(sa, sb) {
                DMatrix::identity(g.nrows(), g.ncols())
            } else {
                DMatrix::zeros(g.nrows(), g.ncols())
            };
            let res = (g - target).amax();
            if res > 1e-8 {
                return Err(LabError::BadEigenbasis(format!("Gram residual {res:.3e}")));
            }
        }
    }
    let mut lower = vec![spaces[0].basis.column(0).into_owned()];
    for l in 1..k - 1 {
        let r = &rotations[l - 1];
        let n = spaces[l].multiplicity();
        if r.nrows() != n || r.ncols() != n || (r.transpose() * r - DMatrix::identity(n, n)).amax() > 1e-10 {
            return Err(LabError::BadEigenbasis(format!("rotation {l} is not orthogonal of size {n}")));
        }
        lower.push(&spaces[l].basis * r.column(0));
    }
    let top = spaces[k - 1].basis.column(0).into_owned();
    if k == 1 {
        return Ok(top);
    }
    Ok(nested(&top, &lower, t))
}

/// Orthogonal matrix from the QR factor of a random matrix.
pub fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

#[derive(Clone, Debug, Serialize)]
pub struct HierarchyLevel {
    pub level: usize,
    pub report: MinmaxReport,
    /// Realizer plus Hessian null directions, M-orthonormalized.
    pub space: EigenSpace,
    pub lowest_hessian: Vec<f64>,
    /// n₁ + … + n_k.
    pub cumulative_multiplicity: usize,
    /// Max energy of the initial sweepout before deformation.
    pub initial_max: f64,
}

fn m_orthonormalize(e: &RayleighEnergy, vs: &[DVector<f64>], against: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in against.iter().chain(basis.iter()) {
                let p = e.m_dot(b, &w);
                w -= b * p;
            }
        }
        let n = e.m_dot(&w, &w).sqrt();
        if n > 1e-6 {
            basis.push(w / n);
        }
    }
    basis
}

/// Levels 1..=levels of the eigenvalue hierarchy. Level k sweeps the nested family
/// over t_k..t₂ ∈ [−1, 1] (n_t samples each) with a random smooth top vector
/// orthogonal to F₁..F_{k−1}; the slices t_k = ±1 carry the lower family and are fixed.
pub fn eigen_hierarchy(
    manifold: DiscreteManifold,
    levels: usize,
    n_t: usize,
    seed: u64,
    opts: &WidthOptions,
) -> Result<Vec<HierarchyLevel>> {
    if levels == 0 || levels > 4 {
        return Err(LabError::BadLevel(levels));
    }
    if n_t < 3 || n_t % 2 == 0 {
        return Err(LabError::BadParameter(format!("n_t = {n_t} must be odd and ≥ 3")));
    }
    let base = RayleighEnergy::new(manifold)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<HierarchyLevel> = Vec::new();
    let mut cumulative = 0;
    for level in 1..=levels {
        let lower_basis: Vec<DVector<f64>> = out
            .iter()
            .flat_map(|l| l.space.basis.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>())
            .collect();
        let raw = manifold.random_smooth(&mut rng);
        let top = m_orthonormalize(&base, &[raw], &lower_basis)
            .pop()
            .ok_or_else(|| LabError::BadEigenbasis("top vector lies in the lower spaces".into()))?;
        let mut lower: Vec<DVector<f64>> = Vec::new();
        for (l, prev) in out.iter().enumerate() {
            let n = prev.space.multiplicity();
            let r = if l == 0 { DMatrix::identity(n, n) } else { random_rotation(n, &mut rng) };
            lower.push(&prev.space.basis * r.column(0));
        }
        let dims = level - 1;
        let total = n_t.pow(dims as u32);
        let ts: Vec<f64> = (0..n_t).map(|i| -1.0 + 2.0 * i as f64 / (n_t - 1) as f64).collect();
        let mut params = Vec::with_capacity(total);
        let mut configs = Vec::with_capacity(total);
        let mut fixed = Vec::with_capacity(total);
        for idx in 0..total {
            // t₂..t_k, t_k varies slowest
            let mut t = vec![0.0; dims];
            let mut r = idx;
            for d in (0..dims).rev() {
                t[d] = ts[r % n_t];
                r /= n_t;
            }
            let x = base.normalize(&nested(&top, &lower, &t));
            fixed.push(dims > 0 && t[dims - 1].abs() == 1.0);
            configs.push(x);
            params.push(t);
        }
        let mut sw = Sweepout {
            shape: vec![n_t; dims],
            params,
            configs,
            fixed,
        };
        let energy = base.deflated(if lower_basis.is_empty() {
            DMatrix::zeros(base.dim(), 0)
        } else {
            DMatrix::from_columns(&lower_basis)
        });
        let initial_max = sw.max(&energy).0;
        let (report, idx) = width(&mut sw, &energy, opts)?;
        let space = realizer_space(&base, &report.candidate, &idx, report.critical_value);
        cumulative += space.multiplicity();
        out.push(HierarchyLevel {
            level,
            space,
            lowest_hessian: idx.lowest.clone(),
            cumulative_multiplicity: cumulative,
            initial_max,
            report,
        });
    }
    Ok(out)
}

fn realizer_space(e: &RayleighEnergy, x: &DVector<f64>, idx: &IndexReport, value: f64) -> EigenSpace {
    let mut vs = vec![x.clone()];
    vs.extend(idx.null_vectors.iter().cloned());
    let basis = m_orthonormalize(e, &vs, &[]);
    EigenSpace {
        value,
        basis: DMatrix::from_columns(&basis),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minmax::{deform, morse_index, DeformState};

    /// (4/h²) sin²(πj/N): spectrum of the periodic second difference.
    fn circle_values(n: usize) -> Vec<f64> {
        let h = 2.0 * PI / n as f64;
        let mut v: Vec<f64> = (0..n).map(|j| 4.0 / (h * h) * (PI * j as f64 / n as f64).sin().powi(2)).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn distinct(v: &[f64]) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for x in v {
            match out.last_mut() {
                Some((y, m)) if (x - *y).abs() < 1e-9 * y.abs().max(1.0) => *m += 1,
                _ => out.push((*x, 1)),
            }
        }
        out
    }

    #[test]
    fn oracle_matches_closed_form() {
        let e = RayleighEnergy::new(DiscreteManifold::Circle { n: 32 }).unwrap();
        let spaces = eigen_oracle(&e, 4);
        let cf = distinct(&circle_values(32));
        for (s, (v, m)) in spaces.iter().zip(&cf) {
            assert!((s.value - v).abs() < 1e-10 * v.max(1.0));
            assert_eq!(s.multiplicity(), *m);
            for c in s.basis.column_iter() {
                assert!((e.energy(&c.into_owned()) - v).abs() < 1e-9 * v.max(1.0));
            }
        }
    }

    #[test]
    fn nested_family_bounds() {
        let e = RayleighEnergy::new(DiscreteManifold::Circle { n: 32 }).unwrap();
        let spaces = eigen_oracle(&e, 4);
        let lam = spaces[3].value;
        let zero = vec![0.0; 3];
        let rots: Vec<DMatrix<f64>> = spaces[1..3].iter().map(|s| DMatrix::identity(s.multiplicity(), s.multiplicity())).collect();
        let u = eigen_nested_family(&e, &spaces, &zero, &rots).unwrap();
        assert!((e.energy(&u) - lam).abs() < 1e-10 * lam);
        let u = eigen_nested_family(&e, &spaces, &[0.3, -0.2, 1.0], &rots).unwrap();
        assert!(e.energy(&u) <= spaces[2].value + 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let t: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let rots: Vec<DMatrix<f64>> = spaces[1..3].iter().map(|s| random_rotation(s.multiplicity(), &mut rng)).collect();
            let u = eigen_nested_family(&e, &spaces, &t, &rots).unwrap();
            assert!((e.m_dot(&u, &u) - 1.0).abs() < 1e-12);
            worst = worst.max(e.energy(&u));
        }
        assert!(worst <= lam + 1e-12);
        let mut bad = spaces.clone();
        bad[1].basis *= 2.0;
        assert!(matches!(eigen_nested_family(&e, &bad, &zero, &rots), Err(LabError::BadEigenbasis(_))));
    }

    #[test]
    fn index_of_eigenvectors() {
        let e = RayleighEnergy::new(DiscreteManifold::Circle { n: 32 }).unwrap();
        let spaces = eigen_oracle(&e, 4);
        let mut below = 0;
        for s in &spaces {
            let u = s.basis.column(0).into_owned();
            let r = morse_index(&e, &u).unwrap();
            assert_eq!(r.index, below);
            assert_eq!(r.nullity, s.multiplicity() - 1);
            below += s.multiplicity();
        }
        let v = e.normalize(&DVector::from_fn(32, |i, _| 1.0 + i as f64));
        assert!(matches!(morse_index(&e, &v), Err(LabError::NotCritical(_))));
    }

    #[test]
    fn deform_leaves_low_slices_alone_and_lowers_the_max() {
        let e = RayleighEnergy::new(DiscreteManifold::Circle { n: 32 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let configs: Vec<DVector<f64>> = (0..5).map(|_| e.normalize(&DiscreteManifold::Circle { n: 32 }.random_smooth(&mut rng))).collect();
        let mut sw = Sweepout { shape: vec![5], params: (0..5).map(|i| vec![i as f64]).collect(), configs, fixed: vec![false; 5] };
        let before = sw.configs.clone();
        let mut st = DeformState::new(5);
        deform(&mut sw, &e, (1e6, 2e6), &mut st).unwrap();
        assert_eq!(before, sw.configs);
        let start = sw.max(&e).0;
        let mut last = start;
        for _ in 0..40 {
            let m = sw.max(&e).0;
            deform(&mut sw, &e, (0.9 * m, 0.95 * m), &mut st).unwrap();
            let now = sw.max(&e).0;
            assert!(now <= last + 1e-14);
            last = now;
        }
        assert!(last < 0.5 * start);
        assert_eq!(st.violations, 0);
    }

    #[test]
    fn hierarchy_on_small_circle() {
        let levels = eigen_hierarchy(DiscreteManifold::Circle { n: 32 }, 3, 9, 5, &WidthOptions::default()).unwrap();
        let cf = distinct(&circle_values(32));
        for (l, (v, m)) in levels.iter().zip(&cf) {
            assert!((l.report.width - v).abs() <= 1e-6 * v.max(1.0), "{} {}", l.report.width, v);
            assert_eq!(l.space.multiplicity(), *m);
            assert!(l.report.morse_index <= l.cumulative_multiplicity);
            assert_eq!(l.report.violations, 0);
        }
        for w in levels.windows(2) {
            assert!(w[1].report.width > w[0].report.width);
        }
    }

    #[test]
    fn constant_sweepout_has_zero_iterations() {
        let e = RayleighEnergy::new(DiscreteManifold::Circle { n: 16 }).unwrap();
        let s = eigen_oracle(&e, 2);
        let u = s[1].basis.column(0).into_owned();
        let mut sw = Sweepout { shape: vec![3], params: vec![vec![0.0]; 3], configs: vec![u.clone(); 3], fixed: vec![false; 3] };
        let (r, _) = width(&mut sw, &e, &WidthOptions::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert!((r.width - s[1].value).abs() < 1e-12);
    }
}
