//! Dense linear-algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, 10_000).ok_or(Error::EigenSolverFailed)?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

pub fn smallest_singular_value(m: &DMatrix<Complex64>) -> Result<f64> {
    singular_values(m).map(|s| s.last().copied().unwrap_or(0.0))
}

/// Eigenvalues of a Hermitian matrix in increasing order.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::EigenSolverFailed)?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `(e^{iθ}A + e^{-iθ}A†)/2`.
pub fn rotated_hermitian_part(a: &DMatrix<Complex64>, theta: f64) -> DMatrix<Complex64> {
    let r = Complex64::from_polar(1.0, theta);
    let m = a * r;
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}
