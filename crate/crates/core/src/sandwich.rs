//! Inclusions `{dist(λ, σ(A)) < ε} ⊂ σ_ε(A) ⊂ {dist(λ, W(A)) < ε}` checked on
//! grid points, with the numerical range `W(A)` bounded by support lines.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::banded::BandedComplexMatrix;
use crate::dense;
use crate::error::Result;
use crate::pseudospectrum::ResolventGrid;

pub const DEFAULT_ANGLES: usize = 64;

/// Support function samples `μ_θ = λ_max((e^{iθ}A + e^{-iθ}A†)/2)`; the
/// numerical range lies in every half-plane `Re(e^{iθ}z) ≤ μ_θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericalRangeHull {
    pub angles: Vec<f64>,
    pub support: Vec<f64>,
}

impl NumericalRangeHull {
    pub fn compute(a: &BandedComplexMatrix, count: usize) -> Result<Self> {
        let dense_a = a.to_dense();
        let h = (&dense_a + dense_a.adjoint()) * Complex64::new(0.5, 0.0);
        let k = (&dense_a - dense_a.adjoint()) * Complex64::new(0.0, -0.5);
        let real = h.iter().chain(k.iter()).all(|z| z.im == 0.0);
        let angles: Vec<f64> = (0..count).map(|j| 2.0 * core::f64::consts::PI * j as f64 / count as f64).collect();
        let mut support = Vec::with_capacity(count);
        for &t in &angles {
            // e^{iθ}(H + iK) + h.c. = 2(cos θ H - sin θ K)
            let (c, s) = (t.cos(), t.sin());
            let top = if real {
                let m = DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| c * h[(i, j)].re - s * k[(i, j)].re);
                let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 10_000)
                    .ok_or(crate::error::Error::EigenSolverFailed)?;
                eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            } else {
                let m = &h * Complex64::new(c, 0.0) - &k * Complex64::new(s, 0.0);
                *dense::hermitian_eigenvalues(&m)?.last().unwrap()
            };
            support.push(top);
        }
        Ok(NumericalRangeHull { angles, support })
    }

    /// Lower bound on `dist(λ, W(A))`; non-positive inside the outer polygon.
    pub fn distance_lower_bound(&self, lambda: Complex64) -> f64 {
        self.angles
            .iter()
            .zip(&self.support)
            .map(|(&t, &mu)| (Complex64::from_polar(1.0, t) * lambda).re - mu)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub epsilon: f64,
    pub points_checked: usize,
    /// Points with `dist(λ, σ) < ε` whose resolvent norm is not above `1/ε`.
    pub spectrum_violations: Vec<Complex64>,
    /// Points in `σ_ε` at distance at least `ε` from the numerical range.
    pub numerical_range_violations: Vec<Complex64>,
}

impl SandwichReport {
    pub fn is_clean(&self) -> bool {
        self.spectrum_violations.is_empty() && self.numerical_range_violations.is_empty()
    }
}

pub fn sandwich_check(
    eigenvalues: &[Complex64],
    hull: &NumericalRangeHull,
    grid: &ResolventGrid,
    epsilon: f64,
) -> SandwichReport {
    let tol = 1e-8;
    let mut spectrum_violations = Vec::new();
    let mut numerical_range_violations = Vec::new();
    let mut points_checked = 0;
    for (z, v) in grid.samples() {
        points_checked += 1;
        let d = eigenvalues.iter().map(|e| (z - e).norm()).fold(f64::INFINITY, f64::min);
        let in_pseudo = v > 1.0 / epsilon;
        if d < epsilon * (1.0 - tol) && !(v * epsilon > 1.0 - tol) {
            spectrum_violations.push(z);
        }
        if in_pseudo && hull.distance_lower_bound(z) >= epsilon * (1.0 + tol) {
            numerical_range_violations.push(z);
        }
    }
    SandwichReport { epsilon, points_checked, spectrum_violations, numerical_range_violations }
}
