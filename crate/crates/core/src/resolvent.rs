//! Smallest singular value of `A - λ` by inverse iteration on `((A-λ)†(A-λ))^{-1}`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::banded::{BandLu, BandedComplexMatrix};
use crate::dense;
use crate::error::{Error, Result};

/// Iteration controls for [`smallest_singular_value`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseIterationOptions {
    /// Relative change of the Rayleigh quotient accepted as converged.
    pub rel_tol: f64,
    /// Iterations before falling back to a dense SVD.
    pub max_iter: usize,
    /// Seed of the deterministic start vector.
    pub seed: u64,
}

impl Default for InverseIterationOptions {
    fn default() -> Self {
        InverseIterationOptions { rel_tol: 1e-11, max_iter: 200, seed: 0x5eed }
    }
}

/// How an `s_min` value was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SminEstimate {
    pub s_min: f64,
    pub iterations: usize,
    pub dense_fallback: bool,
}

fn start_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(unit(), unit())).collect();
    normalize(&mut v);
    v
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let s = norm(v);
    for z in v.iter_mut() {
        *z /= s;
    }
    s
}

/// `s_min(A - λ)`; fails with [`Error::AtEigenvalue`] when `A - λ` is singular
/// to working precision.
pub fn smallest_singular_value(
    a: &BandedComplexMatrix,
    lambda: Complex64,
    opts: &InverseIterationOptions,
) -> Result<SminEstimate> {
    let m = a.shifted(lambda);
    let n = m.dim();
    let scale = m.norm_inf();
    let lu = BandLu::factor(&m);
    if lu.is_singular() {
        return Err(Error::AtEigenvalue(lambda));
    }
    let floor = n as f64 * f64::EPSILON * scale;
    let mut x = start_vector(n, opts.seed);
    let mut rho_prev = 0.0;
    for it in 1..=opts.max_iter {
        lu.solve_adjoint_in_place(&mut x);
        let rho = x.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !rho.is_finite() {
            return Err(Error::AtEigenvalue(lambda));
        }
        lu.solve_in_place(&mut x);
        normalize(&mut x);
        if it > 1 && (rho - rho_prev).abs() <= opts.rel_tol * rho {
            let s = 1.0 / rho.sqrt();
            if s <= floor {
                return Err(Error::AtEigenvalue(lambda));
            }
            return Ok(SminEstimate { s_min: s, iterations: it, dense_fallback: false });
        }
        rho_prev = rho;
    }
    let s = dense::smallest_singular_value(&m.to_dense())?;
    if s <= floor {
        return Err(Error::AtEigenvalue(lambda));
    }
    Ok(SminEstimate { s_min: s, iterations: opts.max_iter, dense_fallback: true })
}

/// `‖(A - λ)^{-1}‖ = 1 / s_min(A - λ)`.
pub fn resolvent_norm(a: &BandedComplexMatrix, lambda: Complex64) -> Result<f64> {
    smallest_singular_value(a, lambda, &InverseIterationOptions::default()).map(|e| 1.0 / e.s_min)
}

/// `‖(A - λ) v‖ / ‖v‖`, an upper bound for `s_min(A - λ)`.
pub fn vector_residual(a: &BandedComplexMatrix, lambda: Complex64, v: &[Complex64]) -> f64 {
    let mut av = a.matvec(v);
    for (y, x) in av.iter_mut().zip(v) {
        *y -= lambda * x;
    }
    norm(&av) / norm(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::build_hamiltonian;
    use crate::potential::PotentialSpec;

    #[test]
    fn normal_case_is_inverse_distance() {
        let a = build_hamiltonian(&PotentialSpec::new(0.0, 1).unwrap(), 100).unwrap();
        assert!((resolvent_norm(&a, Complex64::new(2.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        let z = Complex64::new(6.3, 0.8);
        let d = (z - Complex64::new(7.0, 0.0)).norm();
        assert!((resolvent_norm(&a, z).unwrap() * d - 1.0).abs() < 1e-10);
    }

    #[test]
    fn accretive_bound_in_left_half_plane() {
        let a = build_hamiltonian(&PotentialSpec::cubic(), 100).unwrap();
        for re in [-1.0, -0.5, -3.0] {
            for im in [0.0, 2.0, -4.0] {
                let r = resolvent_norm(&a, Complex64::new(re, im)).unwrap();
                assert!(r <= 1.0 / -re * (1.0 + 1e-12), "({re},{im}) -> {r}");
            }
        }
    }

    #[test]
    fn eigenvalue_is_flagged() {
        let a = build_hamiltonian(&PotentialSpec::new(0.0, 1).unwrap(), 100).unwrap();
        assert_eq!(resolvent_norm(&a, Complex64::new(1.0, 0.0)), Err(Error::AtEigenvalue(Complex64::new(1.0, 0.0))));
    }

    #[test]
    fn agrees_with_dense_svd() {
        let a = build_hamiltonian(&PotentialSpec::cubic(), 120).unwrap();
        for z in [Complex64::new(5.0, 1.0), Complex64::new(12.0, -2.0), Complex64::new(3.0, 0.3)] {
            let s = smallest_singular_value(&a, z, &InverseIterationOptions::default()).unwrap();
            let d = dense::smallest_singular_value(&a.shifted(z).to_dense()).unwrap();
            assert!((s.s_min - d).abs() <= 1e-9 * d.max(1e-300), "{z}: {} vs {d}", s.s_min);
        }
    }

    #[test]
    fn forced_fallback_matches() {
        let a = build_hamiltonian(&PotentialSpec::cubic(), 60).unwrap();
        let z = Complex64::new(8.0, 1.0);
        let opts = InverseIterationOptions { max_iter: 1, ..Default::default() };
        let s = smallest_singular_value(&a, z, &opts).unwrap();
        assert!(s.dense_fallback);
        let t = smallest_singular_value(&a, z, &InverseIterationOptions::default()).unwrap();
        assert!((s.s_min - t.s_min).abs() < 1e-9 * t.s_min);
    }

    #[test]
    fn vector_residual_bounds_smin() {
        let a = build_hamiltonian(&PotentialSpec::cubic(), 50).unwrap();
        let v: Vec<Complex64> = (0..50).map(|k| Complex64::new(1.0 / (1.0 + k as f64), 0.0)).collect();
        let z = Complex64::new(4.0, 0.5);
        let s = smallest_singular_value(&a, z, &InverseIterationOptions::default()).unwrap().s_min;
        assert!(vector_residual(&a, z, &v) >= s);
    }
}
