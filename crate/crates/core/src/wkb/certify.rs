use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::pseudomode::WkbPseudomode;
use crate::error::{Error, Result};
use crate::grid::apply_hamiltonian;
use crate::potential::PotentialSpec;

/// Residuals below this are dominated by cancellation in the direct computation.
pub const CROSS_CHECK_FLOOR: f64 = 1e-12;
/// Largest accepted ratio between algebraic and direct residual norms.
pub const CROSS_CHECK_FACTOR: f64 = 3.0;

/// Residual norms of `(H_h - λ)ψ_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// `‖e^{iφ/h}[-h^{N+2}χ a_N'' - h²(χ''a + 2χ'(a' + (i/h)φ'a))]‖`.
    pub algebraic: f64,
    /// Norm of the `h^{N+2}` term alone.
    pub interior: f64,
    /// Norm of the cutoff-commutator term alone.
    pub commutator: f64,
    /// `‖(H_h - λ)ψ_h‖` with the finite-difference applicator.
    pub direct: f64,
    pub norm: f64,
    /// `algebraic / norm`.
    pub ratio: f64,
    /// Whether the factor-3 comparison with `direct` was enforced.
    pub cross_checked: bool,
}

impl ResidualReport {
    pub fn direct_ratio(&self) -> f64 {
        self.direct / self.norm
    }
}

fn weighted_norm(v: &[Complex64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(z, w)| w * z.norm_sqr()).sum::<f64>().sqrt()
}

/// Algebraic residual split, direct finite-difference residual and, when
/// `enforce_cross_check` is set, their factor-3 agreement.
pub fn certify_residual(mode: &WkbPseudomode, spec: &PotentialSpec, enforce_cross_check: bool) -> Result<ResidualReport> {
    let h = mode.h;
    if mode.n_trunc == 0 {
        return Err(Error::CertificationRefused { h, reason: "the amplitude series does not decrease at this h" });
    }
    let sc = spec.with_h(h)?;
    let f = &mode.fine;
    let hn2 = h.powi(mode.n_trunc as i32 + 2);
    let h2 = h * h;
    let i_over_h = Complex64::new(0.0, 1.0 / h);
    let mut interior = Vec::with_capacity(f.x.len());
    let mut commutator = Vec::with_capacity(f.x.len());
    for k in 0..f.x.len() {
        let (chi, chi1, chi2) = f.chi[k];
        let e = f.phase_factor[k];
        interior.push(e * f.d2a_last[k] * (-hn2 * chi));
        let inner = f.a[k] * chi2 + (f.da[k] + i_over_h * f.dphi[k] * f.a[k]) * (2.0 * chi1);
        commutator.push(e * inner * -h2);
    }
    let total: Vec<Complex64> = interior.iter().zip(&commutator).map(|(a, b)| a + b).collect();
    let w = mode.samples.weights();
    let algebraic = weighted_norm(&total, w);
    let hpsi = apply_hamiltonian(&sc, &mode.samples)?;
    let direct_res: Vec<Complex64> =
        hpsi.values().iter().zip(mode.samples.values()).map(|(a, b)| a - mode.lambda * b).collect();
    let direct = weighted_norm(&direct_res, w);
    let norm = mode.norm;
    let ratio = algebraic / norm;
    if enforce_cross_check && algebraic > CROSS_CHECK_FLOOR && direct > CROSS_CHECK_FLOOR {
        let factor = (algebraic / direct).max(direct / algebraic);
        if factor > CROSS_CHECK_FACTOR {
            return Err(Error::CrossCheckFailed { algebraic, direct });
        }
    }
    if !(ratio < 1.0) {
        return Err(Error::CertificationRefused { h, reason: "residual ratio is not below 1" });
    }
    Ok(ResidualReport {
        algebraic,
        interior: weighted_norm(&interior, w),
        commutator: weighted_norm(&commutator, w),
        direct,
        norm,
        ratio,
        cross_checked: enforce_cross_check,
    })
}
