//! Finite-dimensional sweepout minmax: pseudo-gradient deformation with an
//! energy cutoff, pull-tight width loop, Newton polish and Morse index.

pub mod eigen;
pub mod ellipsoid;

pub use eigen::{
    eigen_hierarchy, eigen_nested_family, eigen_oracle, random_rotation, DiscreteManifold,
    EigenSpace, HierarchyLevel, RayleighEnergy,
};
pub use ellipsoid::{
    birkhoff_shorten, ellipse_perimeter, ellipsoid_widths, plane_slice, polygon_length,
    slice_direction, slicing_sweepout, BirkhoffResult, CurveEnergy, EllipsoidSpec,
    EllipsoidWidth,
};

use crate::error::{LabError, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

/// Armijo constant. With c = 1/2 every accepted step satisfies
/// |step|² ≤ 2τ·(energy drop), which gives the path-length estimate with room to spare.
pub const ARMIJO: f64 = 0.5;
/// Width of the deformation band as a fraction of the current max.
pub const BAND: f64 = 0.1;
/// Eigenvalues of the constrained Hessian with |μ| below this are null directions.
pub const NULL_TOL: f64 = 1e-8;

/// An energy on a constraint manifold in R^N.
pub trait ConstrainedEnergy: Sync {
    fn dim(&self) -> usize;
    fn energy(&self, x: &DVector<f64>) -> f64;
    /// Euclidean gradient.
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Riesz representative, in the deformation metric, of the gradient restricted
    /// to the tangent space at x.
    fn tangent_gradient(&self, x: &DVector<f64>, grad: &DVector<f64>) -> DVector<f64>;
    fn metric_norm(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64;
    /// Projection back onto the constraint.
    fn retract(&self, x: &DVector<f64>) -> DVector<f64>;
    fn constraint_residual(&self, x: &DVector<f64>) -> f64;
    /// Hessian of the Lagrangian at x (multipliers from the gradient).
    fn lagrangian_hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
    /// Columns spanning the tangent space at x.
    fn tangent_basis(&self, x: &DVector<f64>) -> DMatrix<f64>;
    /// Gram matrix used to normalize Hessian eigenvalues on the tangent basis.
    fn index_gram(&self, t: &DMatrix<f64>) -> DMatrix<f64>;
    /// Newton iteration on the first-order conditions.
    fn polish(&self, x: &DVector<f64>, tol: f64) -> Result<DVector<f64>>;

    /// Metric norm of the tangent gradient.
    fn grad_norm(&self, x: &DVector<f64>) -> f64 {
        let g = self.gradient(x);
        let d = self.tangent_gradient(x, &g);
        g.dot(&d).max(0.0).sqrt()
    }
}

/// Parameter grid with one configuration per node.
#[derive(Clone, Debug, Serialize)]
pub struct Sweepout {
    /// Samples per parameter axis.
    pub shape: Vec<usize>,
    pub params: Vec<Vec<f64>>,
    pub configs: Vec<DVector<f64>>,
    /// Slices that carry the lower-level family or a degenerate end; never deformed.
    pub fixed: Vec<bool>,
}

impl Sweepout {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn energies<E: ConstrainedEnergy>(&self, e: &E) -> Vec<f64> {
        self.configs.par_iter().map(|x| e.energy(x)).collect()
    }

    /// (max energy, slice index); ties go to the lowest index.
    pub fn max<E: ConstrainedEnergy>(&self, e: &E) -> (f64, usize) {
        let en = self.energies(e);
        en.iter()
            .enumerate()
            .fold((f64::NEG_INFINITY, 0), |acc, (i, v)| {
                if *v > acc.0 {
                    (*v, i)
                } else {
                    acc
                }
            })
    }
}

/// Accumulated path length, time and energy drop of one slice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub length: f64,
    pub time: f64,
    pub drop: f64,
}

impl Trajectory {
    /// length ≤ 2√(time·drop).
    pub fn holds(&self) -> bool {
        self.length <= 2.0 * (self.time * self.drop).sqrt() * (1.0 + 1e-9) + 1e-15
    }
}

/// Per-slice line-search state and deformation bookkeeping.
#[derive(Clone, Debug, Serialize)]
pub struct DeformState {
    pub step: Vec<f64>,
    pub traj: Vec<Trajectory>,
    pub accepted: usize,
    pub violations: usize,
    /// max over accepted steps of length / (2√(time·drop)).
    pub worst_ratio: f64,
}

impl DeformState {
    pub fn new(n: usize) -> Self {
        DeformState {
            step: vec![1.0; n],
            traj: vec![Trajectory::default(); n],
            accepted: 0,
            violations: 0,
            worst_ratio: 0.0,
        }
    }
}

/// Smooth cutoff: 0 below low, 1 above high.
pub fn cutoff_weight(e: f64, low: f64, high: f64) -> f64 {
    if e <= low {
        0.0
    } else if e >= high {
        1.0
    } else {
        let s = (e - low) / (high - low);
        s * s * (3.0 - 2.0 * s)
    }
}

enum Step {
    Idle,
    Moved(DVector<f64>, Trajectory),
    Rejected,
}

fn step_slice<E: ConstrainedEnergy>(e: &E, x: &DVector<f64>, w: f64, tau0: f64) -> (Step, f64) {
    let en = e.energy(x);
    let g = e.gradient(x);
    let d = e.tangent_gradient(x, &g);
    let slope = g.dot(&d);
    if !(slope > 0.0) {
        return (Step::Idle, tau0);
    }
    let mut tau = tau0;
    while tau > 1e-14 {
        let y = e.retract(&(x - &d * (tau * w)));
        let ey = e.energy(&y);
        if ey <= en - ARMIJO * tau * w * slope {
            let t = Trajectory {
                length: e.metric_norm(x, &(&y - x)),
                time: tau,
                drop: en - ey,
            };
            return (Step::Moved(y, t), (2.0 * tau).min(1e6));
        }
        tau *= 0.5;
    }
    // below resolution of the energy: nothing to do
    if slope.sqrt() < 1e-6 * (1.0 + en.abs()) {
        (Step::Idle, tau0)
    } else {
        (Step::Rejected, tau0)
    }
}

/// One pseudo-gradient step on every free slice, weighted by the cutoff in (low, high).
pub fn deform<E: ConstrainedEnergy>(
    sw: &mut Sweepout,
    e: &E,
    cutoff: (f64, f64),
    state: &mut DeformState,
) -> Result<()> {
    let (low, high) = cutoff;
    if !(low < high) {
        return Err(LabError::BadParameter(format!("cutoff ({low}, {high})")));
    }
    let results: Vec<(usize, Step, f64)> = sw
        .configs
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            if sw.fixed[i] {
                return (i, Step::Idle, state.step[i]);
            }
            let w = cutoff_weight(e.energy(x), low, high);
            if w == 0.0 {
                return (i, Step::Idle, state.step[i]);
            }
            let (s, tau) = step_slice(e, x, w, state.step[i]);
            (i, s, tau)
        })
        .collect();
    for (i, s, tau) in results {
        state.step[i] = tau;
        match s {
            Step::Idle => {}
            Step::Rejected => return Err(LabError::StepRejected(i)),
            Step::Moved(y, t) => {
                let tr = &mut state.traj[i];
                tr.length += t.length;
                tr.time += t.time;
                tr.drop += t.drop;
                state.accepted += 1;
                let bound = 2.0 * (tr.time * tr.drop).sqrt();
                if bound > 0.0 {
                    state.worst_ratio = state.worst_ratio.max(tr.length / bound);
                }
                if !tr.holds() {
                    state.violations += 1;
                }
                sw.configs[i] = y;
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub index: usize,
    pub nullity: usize,
    /// Smallest constrained Hessian eigenvalues, ascending.
    pub lowest: Vec<f64>,
    /// Null directions in ambient coordinates.
    #[serde(skip)]
    pub null_vectors: Vec<DVector<f64>>,
}

/// Negative and null directions of the constrained Hessian at a critical point.
pub fn morse_index<E: ConstrainedEnergy>(e: &E, x: &DVector<f64>) -> Result<IndexReport> {
    let gn = e.grad_norm(x);
    if gn > 1e-6 {
        return Err(LabError::NotCritical(gn));
    }
    let t = e.tangent_basis(x);
    let h = t.transpose() * e.lagrangian_hessian(x) * &t;
    let gram = e.index_gram(&t);
    let l = gram
        .clone()
        .cholesky()
        .ok_or_else(|| LabError::BadParameter("index metric is not positive".into()))?;
    let linv = l
        .l()
        .try_inverse()
        .ok_or_else(|| LabError::BadParameter("index metric is singular".into()))?;
    let mut reduced = &linv * h * linv.transpose();
    reduced = (&reduced + reduced.transpose()) * 0.5;
    let eig = SymmetricEigen::new(reduced);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let vals: Vec<f64> = order.iter().map(|i| eig.eigenvalues[*i]).collect();
    let index = vals.iter().filter(|v| **v < -NULL_TOL).count();
    let null: Vec<usize> = order
        .iter()
        .copied()
        .filter(|i| eig.eigenvalues[*i].abs() <= NULL_TOL)
        .collect();
    let back = linv.transpose();
    let null_vectors = null
        .iter()
        .map(|i| &t * (&back * eig.eigenvectors.column(*i)))
        .collect();
    Ok(IndexReport {
        index,
        nullity: null.len(),
        lowest: vals.into_iter().take(12).collect(),
        null_vectors,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WidthOptions {
    /// Stop pulling tight once the gradient at the max slice is below this.
    pub pull_tol: f64,
    /// Gradient target for the Newton polish.
    pub polish_tol: f64,
    pub max_iter: usize,
}

impl Default for WidthOptions {
    fn default() -> Self {
        WidthOptions {
            pull_tol: 1e-6,
            polish_tol: 1e-8,
            max_iter: 2000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinmaxReport {
    /// Max energy over the deformed sweepout.
    pub width: f64,
    /// Energy of the polished critical point.
    pub critical_value: f64,
    pub argmax: Vec<f64>,
    #[serde(skip)]
    pub candidate: DVector<f64>,
    pub grad_norm: f64,
    pub constraint_residual: f64,
    pub morse_index: usize,
    pub nullity: usize,
    pub iterations: usize,
    pub converged: bool,
    pub accepted_steps: usize,
    pub violations: usize,
    pub worst_ratio: f64,
    /// (iteration, max energy).
    pub trace: Vec<(usize, f64)>,
}

/// Pull-tight loop: deform slices within BAND of the current max until the max
/// slice is nearly critical, then polish it with Newton.
pub fn width<E: ConstrainedEnergy>(
    sw: &mut Sweepout,
    e: &E,
    opts: &WidthOptions,
) -> Result<(MinmaxReport, IndexReport)> {
    let mut state = DeformState::new(sw.len());
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let (m, arg) = sw.max(e);
        trace.push((iterations, m));
        if e.grad_norm(&sw.configs[arg]) < opts.pull_tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        let low = m - BAND * m.abs();
        let high = m - 0.5 * BAND * m.abs();
        if low < high {
            deform(sw, e, (low, high), &mut state)?;
        } else {
            // zero max: the band is empty
            converged = true;
            break;
        }
        iterations += 1;
    }
    let (w, arg) = sw.max(e);
    let candidate = e.polish(&sw.configs[arg], opts.polish_tol)?;
    let idx = morse_index(e, &candidate)?;
    let report = MinmaxReport {
        width: w,
        critical_value: e.energy(&candidate),
        argmax: sw.params[arg].clone(),
        grad_norm: e.grad_norm(&candidate),
        constraint_residual: e.constraint_residual(&candidate),
        candidate,
        morse_index: idx.index,
        nullity: idx.nullity,
        iterations,
        converged,
        accepted_steps: state.accepted,
        violations: state.violations,
        worst_ratio: state.worst_ratio,
        trace,
    };
    Ok((report, idx))
}

/// Solves J δ = −r with singular values below rel·σ_max dropped.
pub(crate) fn pinv_solve(j: DMatrix<f64>, r: &DVector<f64>, rel: f64) -> DVector<f64> {
    let svd = j.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = rel * smax;
    svd.solve(&(-r), eps).unwrap_or_else(|_| DVector::zeros(r.len()))
}

/// Orthonormal basis of the Euclidean complement of u: columns 2..n of the
/// Householder reflection sending u/|u| to ±e₁.
pub(crate) fn complement_basis(u: &DVector<f64>) -> DMatrix<f64> {
    let n = u.len();
    let mut v = u / u.norm();
    let s = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += s;
    let vn2 = v.norm_squared();
    DMatrix::from_fn(n, n - 1, |i, j| {
        let col = j + 1;
        let id = if i == col { 1.0 } else { 0.0 };
        id - 2.0 * v[i] * v[col] / vn2
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff_weight(0.5, 1.0, 2.0), 0.0);
        assert_eq!(cutoff_weight(2.5, 1.0, 2.0), 1.0);
        assert!((cutoff_weight(1.5, 1.0, 2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn complement_is_orthonormal() {
        for u in [DVector::from_vec(vec![1.0, 2.0, 0.0, 1.0, 0.5]), DVector::from_vec(vec![-3.0, 0.0, 1.0, 0.0, 0.0])] {
            let t = complement_basis(&u);
            assert_eq!(t.ncols(), 4);
            assert!((t.transpose() * &t - DMatrix::identity(4, 4)).norm() < 1e-12);
            assert!((u.transpose() * &t).norm() < 1e-12);
        }
    }
}
