use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;
#[allow(unused_imports)]
use num_traits::Float;

use super::certify::ResidualReport;
use super::phase::PhaseFunction;
use super::transport::AmplitudeSeries;
use crate::chebyshev::ChebGrid;
use crate::error::{invalid, Result};
use crate::grid::{uniform_nodes, GridFunction};

/// Default number of uniform samples of `ψ_h`.
pub const FINE_NODES: usize = 4097;

/// Smooth bump equal to 1 on `|x - x0| ≤ r` and 0 outside `|x - x0| < L`,
/// with ramps `S(u) = f(u)/(f(u) + f(1-u))`, `f(u) = e^{-1/u}`,
/// `u = (L - |x - x0|)/(L - r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub center: f64,
    pub plateau: f64,
    pub support: f64,
}

fn mollifier(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let f = (-1.0 / u).exp();
    let u2 = u * u;
    (f, f / u2, f * (1.0 / (u2 * u2) - 2.0 / (u2 * u)))
}

impl Cutoff {
    pub fn new(center: f64, support: f64, plateau_fraction: f64) -> Result<Self> {
        if !(plateau_fraction > 0.0 && plateau_fraction < 1.0) {
            return Err(invalid("plateau fraction must lie in (0, 1)"));
        }
        if !(support > 0.0) {
            return Err(invalid("cutoff support must be positive"));
        }
        Ok(Cutoff { center, plateau: plateau_fraction * support, support })
    }

    /// `(χ, χ', χ'')` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let d = x - self.center;
        let w = self.support - self.plateau;
        let u = (self.support - d.abs()) / w;
        if u >= 1.0 {
            return (1.0, 0.0, 0.0);
        }
        if u <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let (f, f1, f2) = mollifier(u);
        let (g, g1m, g2) = mollifier(1.0 - u);
        // g(u) = f(1-u): g' = -f'(1-u), g'' = f''(1-u).
        let g1 = -g1m;
        let sum = f + g;
        let num1 = f1 * g - f * g1;
        let s1 = num1 / (sum * sum);
        let s2 = ((f2 * g - f * g2) * sum - 2.0 * num1 * (f1 + g1)) / (sum * sum * sum);
        let du = -d.signum() / w;
        (f / sum, s1 * du, s2 * du * du)
    }
}

/// `h^{1/4}` prefactors bracketing `‖ψ_h‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBounds {
    /// `inf|a| (π/M)^{1/4} erf(r (M/h)^{1/2})^{1/2}` with `M = max Im φ''`.
    pub lower: f64,
    /// `(π / Im φ''(x0))^{1/4}`, the Gaussian approximation.
    pub gaussian: f64,
    /// `sup|a| (π C2)^{1/4}`.
    pub upper: f64,
}

/// Fine-grid ingredients of `ψ_h` and of its residual.
#[derive(Debug, Clone, PartialEq)]
pub struct FineSamples {
    pub x: Vec<f64>,
    pub phase_factor: Vec<Complex64>,
    pub a: Vec<Complex64>,
    pub da: Vec<Complex64>,
    pub d2a_last: Vec<Complex64>,
    pub dphi: Vec<Complex64>,
    pub chi: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WkbPseudomode {
    pub phase: PhaseFunction,
    pub amplitudes: AmplitudeSeries,
    pub cutoff: Cutoff,
    pub h: f64,
    pub lambda: Complex64,
    pub n_trunc: usize,
    /// `⌊(e C1 h)^{-1}⌋`.
    pub truncation_cap: usize,
    /// `ψ_h` on the uniform grid spanning the support.
    pub samples: GridFunction,
    pub fine: FineSamples,
    pub norm: f64,
    pub norm_bounds: NormBounds,
    pub residual: Option<ResidualReport>,
}

fn sum_coeffs(terms: &[(f64, &Vec<Complex64>)]) -> Vec<Complex64> {
    let len = terms.iter().map(|t| t.1.len()).max().unwrap_or(0);
    let mut out = alloc::vec![Complex64::zero(); len];
    for (w, c) in terms {
        for (o, v) in out.iter_mut().zip(c.iter()) {
            *o += *v * *w;
        }
    }
    out
}

/// Adaptive truncation: the last `j` before `h^j sup|a_j|` first increases,
/// capped by `⌊(e C1 h)^{-1}⌋`.
pub fn truncation_order(amps: &AmplitudeSeries, h: f64) -> (usize, usize) {
    let cap = (1.0 / (core::f64::consts::E * amps.c1_estimate * h)).floor();
    let cap = if cap.is_finite() && cap >= 0.0 { cap as usize } else { usize::MAX };
    let mut n = 0;
    for j in 1..=amps.order() {
        if h.powi(j as i32) * amps.sup_norms[j] > h.powi(j as i32 - 1) * amps.sup_norms[j - 1] {
            break;
        }
        n = j;
    }
    (n.min(cap), cap)
}

pub fn assemble_pseudomode(
    phase: &PhaseFunction,
    amps: &AmplitudeSeries,
    h: f64,
    plateau_fraction: f64,
) -> Result<WkbPseudomode> {
    assemble_with_nodes(phase, amps, h, plateau_fraction, FINE_NODES)
}

pub fn assemble_with_nodes(
    phase: &PhaseFunction,
    amps: &AmplitudeSeries,
    h: f64,
    plateau_fraction: f64,
    fine_nodes: usize,
) -> Result<WkbPseudomode> {
    if !(h > 0.0) {
        return Err(invalid("h must be positive"));
    }
    if fine_nodes < 17 || fine_nodes % 2 == 0 {
        return Err(invalid("fine grid needs an odd node count of at least 17"));
    }
    let g: &ChebGrid = &phase.grid;
    let x0 = phase.point.x0;
    let half = g.half_width;
    let cutoff = Cutoff::new(x0, half, plateau_fraction)?;
    let (n_trunc, truncation_cap) = truncation_order(amps, h);
    let terms: Vec<(f64, &Vec<Complex64>)> =
        (0..=n_trunc).map(|j| (h.powi(j as i32), &amps.coeffs[j])).collect();
    let a_co = sum_coeffs(&terms);
    let da_co = g.derivative(&a_co);
    let d2_last_co = g.derivative(&g.derivative(&amps.coeffs[n_trunc]));
    let phi_co = g.coefficients(&phase.phi);
    let dphi_co = g.coefficients(&phase.dphi);
    let mut x = uniform_nodes(x0 - half, x0 + half, fine_nodes);
    let mid = fine_nodes / 2;
    x[mid] = x0;
    let i_over_h = Complex64::new(0.0, 1.0 / h);
    let mut phase_factor = Vec::with_capacity(fine_nodes);
    let mut a = Vec::with_capacity(fine_nodes);
    let mut da = Vec::with_capacity(fine_nodes);
    let mut d2a_last = Vec::with_capacity(fine_nodes);
    let mut dphi = Vec::with_capacity(fine_nodes);
    let mut chi = Vec::with_capacity(fine_nodes);
    for &xv in &x {
        let p = if xv == x0 { Complex64::zero() } else { g.eval(&phi_co, xv) };
        phase_factor.push((i_over_h * p).exp());
        a.push(g.eval(&a_co, xv));
        da.push(g.eval(&da_co, xv));
        d2a_last.push(g.eval(&d2_last_co, xv));
        dphi.push(g.eval(&dphi_co, xv));
        chi.push(cutoff.eval(xv));
    }
    let psi: Vec<Complex64> = (0..fine_nodes).map(|k| phase_factor[k] * a[k] * chi[k].0).collect();
    let samples = GridFunction::with_trapezoid(x.clone(), psi)?;
    let norm = samples.l2_norm();
    let sup_a = a.iter().fold(0.0, |m: f64, z| m.max(z.norm()));
    let inf_a_plateau = x
        .iter()
        .zip(&a)
        .filter(|(xv, _)| (**xv - x0).abs() <= cutoff.plateau)
        .fold(f64::INFINITY, |m, (_, z)| m.min(z.norm()));
    let max_im = phase.d2phi.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
    let pi = core::f64::consts::PI;
    let c = g.center_index();
    let norm_bounds = NormBounds {
        lower: inf_a_plateau * (pi / max_im).powf(0.25) * libm::erf(cutoff.plateau * (max_im / h).sqrt()).sqrt(),
        gaussian: (pi / phase.d2phi[c].im).powf(0.25),
        upper: sup_a * (pi * phase.c2).powf(0.25),
    };
    Ok(WkbPseudomode {
        phase: phase.clone(),
        amplitudes: amps.clone(),
        cutoff,
        h,
        lambda: phase.lambda(),
        n_trunc,
        truncation_cap,
        samples,
        fine: FineSamples { x, phase_factor, a, da, d2a_last, dphi, chi },
        norm,
        norm_bounds,
        residual: None,
    })
}

impl WkbPseudomode {
    /// `ψ_h(x0)`.
    pub fn center_value(&self) -> Complex64 {
        self.samples.values()[self.samples.len() / 2]
    }

    /// `max` over plateau samples of `log|ψ| + (x-x0)²/(2 C2 h) - log sup|a|`;
    /// non-positive when the Gaussian envelope holds.
    pub fn envelope_excess(&self) -> f64 {
        let sup_a = self.fine.a.iter().fold(0.0, |m: f64, z| m.max(z.norm()));
        let x0 = self.phase.point.x0;
        self.samples
            .nodes()
            .iter()
            .zip(self.samples.values())
            .filter(|(x, _)| (**x - x0).abs() <= self.cutoff.plateau)
            .map(|(&x, v)| v.norm().ln() + (x - x0) * (x - x0) / (2.0 * self.phase.c2 * self.h) - sup_a.ln())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn with_residual(mut self, report: ResidualReport) -> Self {
        self.residual = Some(report);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape_and_derivatives() {
        let c = Cutoff::new(1.0, 0.8, 0.5).unwrap();
        assert_eq!(c.eval(1.0).0, 1.0);
        assert_eq!(c.eval(1.4).0, 1.0);
        assert_eq!(c.eval(1.8).0, 0.0);
        assert_eq!(c.eval(0.1).0, 0.0);
        let mid = c.eval(1.6);
        assert!((mid.0 - 0.5).abs() < 1e-15);
        let d = 1e-5;
        for &x in &[1.45, 1.55, 1.7, 0.5, 0.35] {
            let (v, v1, v2) = c.eval(x);
            let fd1 = (c.eval(x + d).0 - c.eval(x - d).0) / (2.0 * d);
            let fd2 = (c.eval(x + d).0 - 2.0 * v + c.eval(x - d).0) / (d * d);
            assert!((fd1 - v1).abs() < 1e-6 * (1.0 + v1.abs()), "x={x}");
            assert!((fd2 - v2).abs() < 1e-3 * (1.0 + v2.abs()), "x={x}");
        }
    }

    #[test]
    fn rejects_bad_plateau() {
        assert!(Cutoff::new(0.0, 1.0, 0.0).is_err());
        assert!(Cutoff::new(0.0, 1.0, 1.0).is_err());
    }
}
