use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;
#[allow(unused_imports)]
use num_traits::Float;

use super::phase::PhaseFunction;
use crate::error::{Error, Result};

/// Amplitudes above this sup norm abort the recursion.
pub const BLOWUP_NORM: f64 = 1e15;
/// Transport residuals are measured relative to the largest term and must stay below this.
pub const TRANSPORT_TOLERANCE: f64 = 1e-8;

/// Amplitudes `a_0..=a_J` at the Chebyshev nodes of the phase window.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSeries {
    pub samples: Vec<Vec<Complex64>>,
    pub coeffs: Vec<Vec<Complex64>>,
    pub sup_norms: Vec<f64>,
    /// Relative transport residual of each `a_j`.
    pub residuals: Vec<f64>,
    /// Smallest `C1` with `sup|a_j| ≤ C1^{j+1} j^j` for every computed `j`.
    pub c1_estimate: f64,
}

impl AmplitudeSeries {
    pub fn order(&self) -> usize {
        self.samples.len() - 1
    }
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Smallest `C1` with `norms[j] ≤ C1^{j+1} j^j`.
pub fn fit_c1(norms: &[f64]) -> f64 {
    norms
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0.0)
        .map(|(j, &n)| {
            let jf = j as f64;
            let jlogj = if j == 0 { 0.0 } else { jf * jf.ln() };
            ((n.ln() - jlogj) / (jf + 1.0)).exp()
        })
        .fold(0.0, f64::max)
}

/// `a_0 = (φ'(x0)/φ'(x))^{1/2}` and
/// `a_j(x) = φ'(x)^{-1/2} ∫_{x0}^x i a_{j-1}''(y) / (2 φ'(y)^{1/2}) dy`.
pub fn solve_transport(phase: &PhaseFunction, order: usize) -> Result<AmplitudeSeries> {
    let g = &phase.grid;
    let c = g.center_index();
    let s = &phase.sqrt_dphi;
    let i = Complex64::i();
    let mut a0: Vec<Complex64> = s.iter().map(|&sk| s[c] / sk).collect();
    a0[c] = Complex64::new(1.0, 0.0);
    let mut samples = Vec::with_capacity(order + 1);
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut sup_norms = Vec::with_capacity(order + 1);
    let mut residuals = Vec::with_capacity(order + 1);
    let zero = alloc::vec![Complex64::zero(); g.len()];
    let mut prev_d2 = zero.clone();
    let mut current = a0;
    for j in 0..=order {
        let co = g.coefficients(&current);
        let d1 = g.derivative(&co);
        let d2 = g.values(&g.derivative(&d1));
        let d1v = g.values(&d1);
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for k in 0..g.len() {
            let t1 = phase.dphi[k] * d1v[k];
            let t2 = phase.d2phi[k] * current[k] * 0.5;
            let t3 = i * prev_d2[k] * 0.5;
            worst = worst.max((t1 + t2 - t3).norm());
            scale = scale.max(t1.norm() + t2.norm() + t3.norm());
        }
        let rel = if scale > 0.0 { worst / scale } else { 0.0 };
        if rel > TRANSPORT_TOLERANCE {
            return Err(Error::TransportResidual { j, residual: rel });
        }
        let norm = sup(&current);
        if norm > BLOWUP_NORM {
            return Err(Error::SeriesBlowup { j, norm });
        }
        residuals.push(rel);
        sup_norms.push(norm);
        samples.push(current.clone());
        coeffs.push(co);
        if j == order {
            break;
        }
        let integrand: Vec<Complex64> = d2.iter().zip(s).map(|(&d, &sk)| i * d / (sk * 2.0)).collect();
        let integral = g.values(&g.integral(&g.coefficients(&integrand)));
        let mut next: Vec<Complex64> = integral.iter().zip(s).map(|(&v, &sk)| v / sk).collect();
        next[c] = Complex64::zero();
        prev_d2 = d2;
        current = next;
    }
    let c1_estimate = fit_c1(&sup_norms);
    Ok(AmplitudeSeries { samples, coeffs, sup_norms, residuals, c1_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::ChebGrid;
    use crate::potential::PotentialSpec;
    use crate::wkb::phase::{build_phase, WindowSearch};
    use crate::wkb::turning::{solve_turning_point, SymbolPoint};

    #[test]
    fn constant_phase_derivative_gives_trivial_series() {
        let grid = ChebGrid::new(0.0, 1.0, 32);
        let xi = Complex64::new(-1.5, 0.0);
        let n = grid.len();
        let phi = grid.x.iter().map(|&x| xi * x).collect();
        let pt = SymbolPoint { x0: 0.0, xi0: -1.5, lambda: Complex64::new(2.25, 0.0), h: 0.1 };
        let phase = PhaseFunction::from_parts(pt, grid, 2.0, 1.0, phi, alloc::vec![xi; n], alloc::vec![Complex64::zero(); n]);
        let a = solve_transport(&phase, 5).unwrap();
        assert!(a.samples[0].iter().all(|&z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        for j in 1..=5 {
            assert!(a.sup_norms[j] < 1e-14, "j={j}");
        }
    }

    #[test]
    fn reference_series() {
        let spec = PotentialSpec::cubic().with_h(0.01).unwrap();
        let pt = solve_turning_point(Complex64::new(2.0, 1.0), 0.01, &spec).unwrap();
        let phase = build_phase(&pt, &spec, &WindowSearch::default()).unwrap();
        let a = solve_transport(&phase, 12).unwrap();
        let c = phase.grid.center_index();
        assert_eq!(a.samples[0][c], Complex64::new(1.0, 0.0));
        for j in 1..=12 {
            assert_eq!(a.samples[j][c], Complex64::zero());
        }
        assert!(a.c1_estimate < 20.0);
        for (j, &n) in a.sup_norms.iter().enumerate() {
            let jf = j as f64;
            let jlogj = if j == 0 { 0.0 } else { jf * jf.ln() };
            assert!(n.ln() - (jf + 1.0) * a.c1_estimate.ln() - jlogj <= 1e-12);
        }
        assert!(a.residuals.iter().all(|&r| r < TRANSPORT_TOLERANCE));
    }

    #[test]
    fn c1_fit_of_known_sequence() {
        let norms: Vec<f64> = (0..6).map(|j| 2f64.powi(j + 1) * (j as f64).powi(j)).collect();
        assert!((fit_c1(&norms) - 2.0).abs() < 1e-12);
    }
}
