//! Hermite-basis matrices of `H` and `H_h`.
//!
//! In the eigenbasis `ψ_k` of `-d²/dx² + x²` the position operator is the
//! tridiagonal `X_{k,k+1} = sqrt((k+1)/2)` and the momentum `-i d/dx` is
//! `P_{k,k+1} = -P_{k+1,k} = i sqrt((k+1)/2)`. Powers are formed at a padded
//! dimension and then truncated, so every retained entry equals the
//! corresponding entry of the infinite matrix.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::banded::{BandLu, Banded, BandedComplexMatrix, BandedRealMatrix, BasisTag};
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

pub fn position_matrix(dim: usize) -> BandedRealMatrix {
    let mut x = Banded::zeros(dim, 1);
    x.basis_tag = BasisTag::Hermite;
    for k in 0..dim.saturating_sub(1) {
        let s = ((k + 1) as f64 / 2.0).sqrt();
        x.set(k, k + 1, s);
        x.set(k + 1, k, s);
    }
    x
}

/// Position matrix of dimension `n + padding` as a complex banded matrix.
pub fn build_position_matrix(n: usize, padding: usize) -> BandedComplexMatrix {
    position_matrix(n + padding).to_complex()
}

pub fn momentum_matrix(dim: usize) -> BandedComplexMatrix {
    let mut p = Banded::zeros(dim, 1);
    p.basis_tag = BasisTag::Hermite;
    for k in 0..dim.saturating_sub(1) {
        let s = ((k + 1) as f64 / 2.0).sqrt();
        p.set(k, k + 1, Complex64::new(0.0, s));
        p.set(k + 1, k, Complex64::new(0.0, -s));
    }
    p
}

/// `T_n(X^power)` computed at dimension `n + padding`.
pub fn position_power(n: usize, power: u32, padding: usize) -> BandedRealMatrix {
    let x = position_matrix(n + padding);
    let mut acc = x.clone();
    for _ in 1..power {
        acc = acc.matmul(&x);
    }
    let mut out = acc.truncate(n);
    for r in 0..n {
        for c in r + 1..(r + power as usize + 1).min(n) {
            let v = out.get(r, c);
            out.set(c, r, v);
        }
    }
    out
}

/// Kinetic matrix `P†P` truncated to `n`, formed at dimension `n + 1`.
pub fn kinetic_matrix(n: usize) -> BandedRealMatrix {
    let p = momentum_matrix(n + 1);
    let k = p.adjoint().matmul(&p).truncate(n);
    k.map(|v| v.re)
}

/// Hermite-basis truncation of `H` (or `H_h` when `spec.semiclassical_h` is set).
///
/// Physical case: `diag(2k+1) + iβ T_N(X^(2n+1))`.
/// Semiclassical case: `h² T_N(P†P) + c_h T_N(X²) + iβ T_N(X^(2n+1))`.
pub fn build_hamiltonian(spec: &PotentialSpec, n: usize) -> Result<BandedComplexMatrix> {
    spec.validate()?;
    let p = spec.odd_power();
    let bw = p as usize;
    if n < bw + 1 {
        return Err(Error::DimensionTooSmall { dim: n, bandwidth: bw });
    }
    let odd = position_power(n, p, bw);
    let mut a: BandedComplexMatrix = Banded::zeros(n, bw);
    a.basis_tag = BasisTag::Hermite;
    match spec.semiclassical_h {
        None => {
            for (r, c, v) in odd.entries() {
                let re = if r == c { (2 * r + 1) as f64 } else { 0.0 };
                a.set(r, c, Complex64::new(re, spec.beta * v));
            }
        }
        Some(_) => {
            let h2 = spec.kinetic_coefficient();
            let ch = spec.quadratic_coefficient();
            let kin = kinetic_matrix(n);
            let x2 = position_power(n, 2, 2);
            for (r, c, v) in odd.entries() {
                let re = if r.abs_diff(c) <= 2 { h2 * kin.get(r, c) + ch * x2.get(r, c) } else { 0.0 };
                a.set(r, c, Complex64::new(re, spec.beta * v));
            }
        }
    }
    Ok(a)
}

/// `max |(P Ā P - A)_{jk}|` with `P = diag((-1)^k)`.
pub fn pt_symmetry_defect(a: &BandedComplexMatrix) -> f64 {
    a.entries()
        .map(|(r, c, v)| {
            let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
            (v.conj() * sign - v).norm()
        })
        .fold(0.0, f64::max)
}

/// `(A + A†)/2`.
pub fn hermitian_part(a: &BandedComplexMatrix) -> BandedComplexMatrix {
    let ah = a.adjoint();
    let mut out = a.clone();
    for (r, c, v) in a.entries() {
        out.set(r, c, (v + ah.get(r, c)) * 0.5);
    }
    out
}

/// Smallest eigenvalue of the real symmetric tridiagonal or diagonal Hermitian
/// part, by bisection on Sturm sequences. Only valid when the Hermitian part
/// is real and tridiagonal (which it is for the physical operator, where it
/// is diagonal).
pub fn hermitian_part_min_eigenvalue(a: &BandedComplexMatrix) -> Option<f64> {
    let hp = hermitian_part(a);
    let n = hp.dim();
    for (r, c, v) in hp.entries() {
        if r.abs_diff(c) > 1 && v.norm() != 0.0 {
            return None;
        }
        if v.im != 0.0 {
            return None;
        }
    }
    let diag: alloc::vec::Vec<f64> = (0..n).map(|i| hp.get(i, i).re).collect();
    let off: alloc::vec::Vec<f64> = (0..n.saturating_sub(1)).map(|i| hp.get(i, i + 1).re).collect();
    let radius = (0..n)
        .map(|i| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = if i + 1 < n { off[i].abs() } else { 0.0 };
            (diag[i] - l - r, diag[i] + l + r)
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (lo, hi)| (acc.0.min(lo), acc.1.max(hi)));
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            let b2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
            q = diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (diag[i].abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let (mut lo, mut hi) = radius;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Whether `A - λ` has an exactly zero pivot.
pub fn is_exactly_singular_shift(a: &BandedComplexMatrix, lambda: Complex64) -> bool {
    BandLu::factor(&a.shifted(lambda)).is_singular()
}
