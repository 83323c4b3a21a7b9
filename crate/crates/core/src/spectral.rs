//! Eigenvalues, eigenvalue condition numbers `‖P_k‖` and the tameness test.
//!
//! Both eigenvector families come from one complex Schur form `A = Q T Q†`:
//! right eigenvectors solve `(T - t_kk) y = 0` by back substitution, left ones
//! solve `(T - t_kk)† w = 0` by forward substitution, and
//! `‖P_k‖ = ‖y‖‖w‖/|w†y|` is invariant under the unitary `Q`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
#[allow(unused_imports)]
use num_traits::Float;

use crate::banded::BandedComplexMatrix;
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::operator::build_hamiltonian;
use crate::potential::PotentialSpec;

/// Overlaps `|v†u|` below this mark a numerically defective pair.
pub const DEFECTIVE_OVERLAP: f64 = 1e-12;
/// Relative eigenvalue agreement between `N` and `1.5N` counted as converged.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-6;
/// Relative projection-norm agreement between `N` and `1.5N`.
pub const PROJECTION_TOLERANCE: f64 = 0.01;

/// Complex Schur factors `A = Q T Q†`, `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: DMatrix<Complex64>,
    pub t: DMatrix<Complex64>,
}

impl SchurForm {
    pub fn compute(a: &DMatrix<Complex64>) -> Result<Self> {
        let schur = nalgebra::Schur::try_new(a.clone(), f64::EPSILON, 0).ok_or(Error::EigenSolverFailed)?;
        let (q, mut t) = schur.unpack();
        for j in 0..t.ncols() {
            for i in j + 1..t.nrows() {
                t[(i, j)] = Complex64::zero();
            }
        }
        Ok(SchurForm { q, t })
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    fn guard(&self) -> f64 {
        let scale = self.t.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        f64::EPSILON * scale.max(f64::MIN_POSITIVE)
    }

    /// Right eigenvector of `T` for `t_kk`, in Schur coordinates.
    pub fn right_vector(&self, k: usize) -> DVector<Complex64> {
        let t = &self.t;
        let lam = t[(k, k)];
        let guard = self.guard();
        let mut y = DVector::zeros(t.nrows());
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::zero();
            for j in i + 1..=k {
                acc += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < guard {
                d = Complex64::new(guard, 0.0);
            }
            y[i] = -acc / d;
        }
        y
    }

    /// Left eigenvector (eigenvector of `T†` for `conj(t_kk)`), in Schur coordinates.
    pub fn left_vector(&self, k: usize) -> DVector<Complex64> {
        let t = &self.t;
        let n = t.nrows();
        let lam = t[(k, k)];
        let guard = self.guard();
        let mut w = DVector::zeros(n);
        w[k] = Complex64::new(1.0, 0.0);
        for i in k + 1..n {
            let mut acc = Complex64::zero();
            for j in k..i {
                acc += t[(j, i)].conj() * w[j];
            }
            let mut d = (t[(i, i)] - lam).conj();
            if d.norm() < guard {
                d = Complex64::new(guard, 0.0);
            }
            w[i] = -acc / d;
        }
        w
    }
}

/// Eigenvalues of one truncation with the condition data of the lowest ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pub matrix_dim: usize,
    /// All eigenvalues ordered by `(re, im)`.
    pub all_eigenvalues: Vec<Complex64>,
    /// The first `k_max` of `all_eigenvalues`.
    pub eigenvalues: Vec<Complex64>,
    /// `|v_k†u_k|` for unit `u_k`, `v_k`.
    pub overlaps: Vec<f64>,
    pub projection_norms: Vec<f64>,
    /// `‖A u_k - λ_k u_k‖` for the unit right eigenvectors in the original basis.
    pub residuals: Vec<f64>,
}

fn by_re_im(a: &Complex64, b: &Complex64) -> core::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn eigensystem(a: &BandedComplexMatrix, k_max: usize) -> Result<Eigensystem> {
    let dense = a.to_dense();
    let schur = SchurForm::compute(&dense)?;
    let diag = schur.eigenvalues();
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&i, &j| by_re_im(&diag[i], &diag[j]));
    let all_eigenvalues: Vec<Complex64> = order.iter().map(|&i| diag[i]).collect();
    let k = k_max.min(diag.len());
    let mut overlaps = Vec::with_capacity(k);
    let mut projection_norms = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let y = schur.right_vector(idx);
        let w = schur.left_vector(idx);
        let (ny, nw) = (y.norm(), w.norm());
        let overlap = w.dotc(&y).norm() / (ny * nw);
        overlaps.push(overlap);
        projection_norms.push(1.0 / overlap);
        let u = &schur.q * (y / Complex64::new(ny, 0.0));
        let r = &dense * &u - &u * diag[idx];
        residuals.push(r.norm());
    }
    Ok(Eigensystem {
        matrix_dim: a.dim(),
        all_eigenvalues: all_eigenvalues.clone(),
        eigenvalues: all_eigenvalues[..k].to_vec(),
        overlaps,
        projection_norms,
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub matrix_dim: usize,
    pub reference_dim: usize,
    pub k_max: usize,
    /// `k_max` was reduced to `N/4`.
    pub k_max_clipped: bool,
    pub eigenvalues: Vec<Complex64>,
    pub overlaps: Vec<f64>,
    pub projection_norms: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
    pub converged_count: usize,
    /// Indices with `|v†u| < 1e-12`.
    pub defective: Vec<usize>,
    /// Largest `|λ - conj(λ')|` over the best conjugate pairing of all eigenvalues,
    /// relative to `max(1, |λ|)`.
    pub conjugation_defect: f64,
}

/// Marks eigenpairs of `coarse` converged when `fine` has an eigenvalue within
/// relative `1e-6` whose projection norm agrees to 1%.
pub fn compare_sizes(coarse: &Eigensystem, fine: &Eigensystem, k_max_clipped: bool) -> EigenReport {
    let k = coarse.eigenvalues.len();
    let mut converged = vec![false; k];
    for i in 0..k {
        let lam = coarse.eigenvalues[i];
        let best = fine
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - lam).norm().total_cmp(&(b.1 - lam).norm()));
        if let Some((j, mu)) = best {
            let ev_ok = (mu - lam).norm() <= EIGENVALUE_TOLERANCE * lam.norm().max(1.0);
            let p_ok = (fine.projection_norms[j] - coarse.projection_norms[i]).abs()
                <= PROJECTION_TOLERANCE * fine.projection_norms[j];
            converged[i] = ev_ok && p_ok;
        }
    }
    let defective = coarse.overlaps.iter().enumerate().filter(|(_, &o)| o < DEFECTIVE_OVERLAP).map(|(i, _)| i).collect();
    EigenReport {
        matrix_dim: coarse.matrix_dim,
        reference_dim: fine.matrix_dim,
        k_max: k,
        k_max_clipped,
        eigenvalues: coarse.eigenvalues.clone(),
        overlaps: coarse.overlaps.clone(),
        projection_norms: coarse.projection_norms.clone(),
        residuals: coarse.residuals.clone(),
        converged_count: converged.iter().filter(|&&c| c).count(),
        converged,
        defective,
        conjugation_defect: conjugation_defect(&coarse.all_eigenvalues),
    }
}

/// Reference size used for the convergence comparison.
pub fn reference_dim(n: usize) -> usize {
    (3 * n).div_ceil(2)
}

/// Eigenvalues and projection norms of the `N`-truncation of `spec`, checked
/// against the `1.5N` truncation. `k_max` is clipped to `N/4`.
pub fn compute_spectrum(spec: &PotentialSpec, n: usize, k_max: usize) -> Result<EigenReport> {
    let limit = n / 4;
    let clipped = k_max > limit;
    let k = k_max.min(limit);
    let coarse = eigensystem(&build_hamiltonian(spec, n)?, k)?;
    let fine = eigensystem(&build_hamiltonian(spec, reference_dim(n))?, k + 4)?;
    Ok(compare_sizes(&coarse, &fine, clipped))
}

/// Largest relative distance in a greedy pairing of `λ` with `conj(λ')`.
pub fn conjugation_defect(values: &[Complex64]) -> f64 {
    let mut used = vec![false; values.len()];
    let mut worst = 0.0f64;
    for (i, z) in values.iter().enumerate() {
        if used[i] {
            continue;
        }
        let target = z.conj();
        let mut best = None;
        for (j, w) in values.iter().enumerate() {
            if used[j] || j == i && z.im != 0.0 {
                continue;
            }
            let d = (w - target).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.unwrap_or((i, (z - target).norm()));
        used[i] = true;
        used[j] = true;
        worst = worst.max(d / z.norm().max(1.0));
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct TamenessVerdict {
    /// `log‖P_k‖ ≈ log a + α log k`, `k` counted from 1.
    pub polynomial_fit: LinearFit,
    /// `log‖P_k‖ ≈ c + γ k`.
    pub exponential_fit: LinearFit,
    pub alpha_max: f64,
    pub a_max: f64,
    /// Some converged `k` has `‖P_k‖ > a_max k^{alpha_max}`.
    pub polynomial_bound_violated: bool,
    pub exponential_preferred: bool,
    pub tame: bool,
}

impl TamenessVerdict {
    pub fn label(&self) -> &'static str {
        if self.tame {
            "tame"
        } else {
            "not tame at this scale"
        }
    }
}

pub fn tameness_test(report: &EigenReport, alpha_max: f64, a_max: f64) -> Result<TamenessVerdict> {
    let points: Vec<(f64, f64)> = report
        .projection_norms
        .iter()
        .zip(&report.converged)
        .enumerate()
        .filter(|(_, (_, &c))| c)
        .map(|(k, (&p, _))| ((k + 1) as f64, p))
        .collect();
    if points.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "tameness needs 6 converged projection norms, got {}",
            points.len()
        )));
    }
    let logk: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let k: Vec<f64> = points.iter().map(|p| p.0).collect();
    let logp: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let polynomial_fit = linear_fit(&logk, &logp)?;
    let exponential_fit = linear_fit(&k, &logp)?;
    let violated = points.iter().any(|&(k, p)| p > a_max * k.powf(alpha_max) * (1.0 + 1e-12));
    Ok(TamenessVerdict {
        polynomial_fit,
        exponential_fit,
        alpha_max,
        a_max,
        polynomial_bound_violated: violated,
        exponential_preferred: exponential_fit.r_squared > polynomial_fit.r_squared,
        tame: !violated,
    })
}
