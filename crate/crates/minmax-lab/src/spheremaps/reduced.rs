//! One- and two-variable reductions of E(π∘Ψ_{t e₁}), and the monotonicity
//! certificate for f(A) = √(A²−1) log((A+σ)/(A−σ)).

use crate::grid::{adaptive_quadrature, gauss_legendre_on};
use serde::Serialize;
use std::f64::consts::PI;

/// log((1+x)/(1−x)).
fn log_ratio(x: f64) -> f64 {
    x.ln_1p() - (-x).ln_1p()
}

/// E(π∘Ψ_{t e₁}) = 4π∫_{−1}^{1} ds/(1−s²) (1/sinh α) log[(1+τσ)/(1−τσ)],
/// σ = √(1−s²), cosh α = (1+t²)/(1−t²), τ = tanh α. Integrated in s = cos χ.
pub fn reduced_integral(t: f64) -> f64 {
    assert!((0.0..1.0).contains(&t), "t = {t} outside [0, 1)");
    if t == 0.0 {
        return 8.0 * PI * PI;
    }
    let tau = 2.0 * t / (1.0 + t * t);
    let sinh = 2.0 * t / (1.0 - t * t);
    let f = |chi: f64| {
        let sigma = chi.sin();
        4.0 * PI * log_ratio(tau * sigma) / (sigma * sinh)
    };
    let tol = 1e-12;
    adaptive_quadrature(&f, 0.0, 0.5 * PI, tol) + adaptive_quadrature(&f, 0.5 * PI, PI, tol)
}

/// The same energy as a product Gauss–Legendre integral over the polar angle χ of
/// S³ and the angle θ to the e₁ axis in the slice S²:
/// ∫∫ 4π (1−t²) sin θ / (1+t²+2t sin χ cos θ) dχ dθ.
pub fn slice_reduction(t: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre_on(n, 0.0, PI);
    let mut total = 0.0;
    for (c, wc) in x.iter().zip(&w) {
        let sc = c.sin();
        let row: f64 = x
            .iter()
            .zip(&w)
            .map(|(th, wt)| wt * th.sin() / (1.0 + t * t + 2.0 * t * sc * th.cos()))
            .sum();
        total += wc * row;
    }
    4.0 * PI * (1.0 - t * t) * total
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub sigma: f64,
    /// Smallest finite-difference slope of f on the grid.
    pub min_f_slope: f64,
    pub min_g: f64,
    pub max_g_prime: f64,
    /// Largest mismatch between g' and a central difference of g.
    pub g_prime_fd_error: f64,
    /// f at A = 1e6, approximating f(∞) = 2σ.
    pub f_far: f64,
    /// g at A = 1e6, approximating g(∞) = 0.
    pub g_far: f64,
    /// g(1) = log((1+σ)/(1−σ)).
    pub g_at_one: f64,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.min_f_slope >= -1e-10 && self.min_g >= 0.0 && self.max_g_prime < 0.0
    }
}

pub fn mono_f(sigma: f64, a: f64) -> f64 {
    (a * a - 1.0).sqrt() * log_ratio(sigma / a)
}

/// g with f'(A) = A/√(A²−1) g(A).
pub fn mono_g(sigma: f64, a: f64) -> f64 {
    log_ratio(sigma / a) - 2.0 * sigma * (a - 1.0 / a) / (a * a - sigma * sigma)
}

pub fn mono_g_prime(sigma: f64, a: f64) -> f64 {
    let d = a * a - sigma * sigma;
    -2.0 * sigma * (a * a * (3.0 - 2.0 * sigma * sigma) - sigma * sigma) / (a * a * d * d)
}

/// Checks f increasing, g ≥ 0 and g' < 0 on a grid of A > 1.
pub fn monotonicity_certificate(sigma: f64, a_grid: &[f64]) -> MonotonicityReport {
    assert!(sigma > 0.0 && sigma < 1.0, "sigma = {sigma} outside (0, 1)");
    assert!(a_grid.iter().all(|a| *a > 1.0), "A grid must lie in (1, ∞)");
    let f: Vec<f64> = a_grid.iter().map(|a| mono_f(sigma, *a)).collect();
    let min_f_slope = a_grid
        .windows(2)
        .zip(f.windows(2))
        .map(|(a, f)| (f[1] - f[0]) / (a[1] - a[0]))
        .fold(f64::INFINITY, f64::min);
    let min_g = a_grid
        .iter()
        .map(|a| mono_g(sigma, *a))
        .fold(f64::INFINITY, f64::min);
    let max_g_prime = a_grid
        .iter()
        .map(|a| mono_g_prime(sigma, *a))
        .fold(f64::NEG_INFINITY, f64::max);
    let g_prime_fd_error = a_grid
        .iter()
        .map(|a| {
            let h = 1e-5 * a;
            let fd = (mono_g(sigma, a + h) - mono_g(sigma, a - h)) / (2.0 * h);
            (fd - mono_g_prime(sigma, *a)).abs()
        })
        .fold(0.0, f64::max);
    MonotonicityReport {
        sigma,
        min_f_slope,
        min_g,
        max_g_prime,
        g_prime_fd_error,
        f_far: mono_f(sigma, 1e6),
        g_far: mono_g(sigma, 1e6),
        g_at_one: mono_g(sigma, 1.0),
    }
}
