//! Numerical laboratory for the non-self-adjoint oscillator
//! `H = -d²/dx² + x² + iβ x^(2n+1)`.
//!
//! The crate is `no_std` (with `alloc`): every routine here is a pure function
//! of its inputs. File formats, the command line and thread pools live in the
//! companion `ptlab` crate.
//!
//! Layout:
//!
//! * [`operator`], [`banded`], [`grid`], [`hermite`]: Hermite-basis
//!   discretization of `H` and of its semiclassical analogue `H_h`, plus a
//!   finite-difference real-space applicator used as an independent check.
//! * [`resolvent`], [`pseudospectrum`], [`contour`], [`sandwich`]: resolvent
//!   norms by banded inverse iteration, grid sweeps, isolines and the
//!   spectrum / numerical-range inclusions.
//! * [`wkb`]: explicit JWKB pseudomodes with certified residuals.
//! * [`scaling`]: the dilation linking `H` and `H_h`, the region predicates and
//!   the log-power pseudospectral bound.
//! * [`spectral`], [`semigroup`]: eigenvalues, spectral projection norms and
//!   the norm of `exp(-itA)`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod banded;
pub mod chebyshev;
pub mod contour;
pub mod dense;
pub mod error;
pub mod fit;
pub mod grid;
pub mod hermite;
pub mod operator;
pub mod potential;
pub mod pseudospectrum;
pub mod resolvent;
pub mod sandwich;
pub mod scaling;
pub mod semigroup;
pub mod spectral;
pub mod wkb;

pub use banded::BandedComplexMatrix;
pub use error::{Error, Result};
pub use grid::GridFunction;
pub use num_complex::Complex64;
pub use potential::PotentialSpec;
