//! JWKB pseudomodes `ψ_h = e^{iφ/h} χ Σ h^j a_j` of `H_h - λ` and their
//! residual certificates.
//!
//! The pipeline for one `(λ, h)`: [`solve_turning_point`] finds `(x0, ξ0)`
//! with `ξ0² + V_h(x0) = λ`, [`build_phase`] solves the eikonal equation on a
//! Chebyshev window around `x0`, [`solve_transport`] computes the amplitudes,
//! [`assemble_pseudomode`] sums and cuts off the series and
//! [`certify_residual`] measures `‖(H_h - λ)ψ_h‖ / ‖ψ_h‖`. [`run_ladder`]
//! repeats this over a list of `h` and fits the exponential decay.

use num_complex::Complex64;

use crate::potential::PotentialSpec;

pub mod branch;
pub mod certify;
pub mod ladder;
pub mod phase;
pub mod pseudomode;
pub mod transport;
pub mod turning;

pub use certify::{certify_residual, ResidualReport};
pub use ladder::{run_ladder, LadderEntry, LadderOptions, LadderReport};
pub use phase::{build_phase, PhaseFunction, WindowSearch};
pub use pseudomode::{assemble_pseudomode, Cutoff, NormBounds, WkbPseudomode};
pub use transport::{solve_transport, AmplitudeSeries};
pub use turning::{solve_turning_point, SymbolPoint};

/// A potential `V(z)` analytic near the real axis.
pub trait Symbol {
    fn potential(&self, z: Complex64) -> Complex64;
    fn potential_derivative(&self, z: Complex64) -> Complex64;
}

impl Symbol for PotentialSpec {
    fn potential(&self, z: Complex64) -> Complex64 {
        PotentialSpec::potential(self, z)
    }

    fn potential_derivative(&self, z: Complex64) -> Complex64 {
        PotentialSpec::potential_derivative(self, z)
    }
}
