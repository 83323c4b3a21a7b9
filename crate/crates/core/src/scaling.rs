//! The dilation `(Uf)(x) = τ^{1/2} f(τx)` with `U H U^{-1} = τ^{2n+1} H_h`,
//! `h = τ^{-(2n+3)/2}`, and the regions of the complex plane it relates.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::grid::{apply_hamiltonian, GridFunction};
use crate::hermite::synthesize;
use crate::operator::build_hamiltonian;
use crate::potential::PotentialSpec;
use crate::wkb::WkbPseudomode;

fn h_exponent(n: u32) -> f64 {
    (2.0 * f64::from(n) + 3.0) / 2.0
}

pub fn tau_to_h(tau: f64, n: u32) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) || n < 1 {
        return Err(invalid("tau must be positive and n at least 1"));
    }
    Ok(tau.powf(-h_exponent(n)))
}

pub fn h_to_tau(h: f64, n: u32) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) || n < 1 {
        return Err(invalid("h must be positive and n at least 1"));
    }
    Ok(h.powf(-1.0 / h_exponent(n)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    pub tau: f64,
    pub n: u32,
    pub h: f64,
}

impl ScalingParams {
    pub fn from_tau(tau: f64, n: u32) -> Result<Self> {
        Ok(ScalingParams { tau, n, h: tau_to_h(tau, n)? })
    }

    pub fn from_h(h: f64, n: u32) -> Result<Self> {
        Ok(ScalingParams { tau: h_to_tau(h, n)?, n, h })
    }

    /// `τ^{2n+1}`, the factor relating the two spectral planes.
    pub fn energy_scale(&self) -> f64 {
        self.tau.powi(2 * self.n as i32 + 1)
    }

    pub fn to_physical(&self, lambda: Complex64) -> Complex64 {
        lambda * self.energy_scale()
    }

    pub fn to_semiclassical(&self, lambda: Complex64) -> Complex64 {
        lambda / self.energy_scale()
    }
}

/// Which angular bound a region uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgBound {
    /// `|arg λ| < arctan(Re μ) - δ` with `μ = λ/|λ|` when `δ > 0`.
    Arctan,
    /// `|arg λ| < π/2 - δ`.
    HalfPi,
}

impl ArgBound {
    pub fn label(&self) -> &'static str {
        match self {
            ArgBound::Arctan => "arctan",
            ArgBound::HalfPi => "half-pi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "arctan" => Some(ArgBound::Arctan),
            "half-pi" => Some(ArgBound::HalfPi),
            _ => None,
        }
    }
}

/// `Λ` for `δ = 0`: `Re λ > 0` and `|arg λ| < arctan Re λ`. For `δ > 0` the
/// point is first normalized to `|λ| = 1` and the bound is `arctan Re λ - δ`.
pub fn in_lambda_region(lambda: Complex64, delta: f64) -> bool {
    in_region_with(lambda, delta, ArgBound::Arctan)
}

pub fn in_region_with(lambda: Complex64, delta: f64, bound: ArgBound) -> bool {
    if !(lambda.re > 0.0) || !(delta >= 0.0) {
        return false;
    }
    let z = if delta > 0.0 { lambda / lambda.norm() } else { lambda };
    let limit = match bound {
        ArgBound::Arctan => z.re.atan() - delta,
        ArgBound::HalfPi => core::f64::consts::FRAC_PI_2 - delta,
    };
    z.arg().abs() < limit
}

/// Largest `|arg|` admitted on the unit circle with margin `delta`.
pub fn max_unit_argument(delta: f64, bound: ArgBound) -> f64 {
    match bound {
        ArgBound::HalfPi => (core::f64::consts::FRAC_PI_2 - delta).max(0.0),
        ArgBound::Arctan => {
            // Root of θ + δ = arctan(cos θ) on [0, π/4].
            let g = |t: f64| t.cos().atan() - delta - t;
            if g(0.0) <= 0.0 {
                return 0.0;
            }
            let (mut lo, mut hi) = (0.0, core::f64::consts::FRAC_PI_4);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub delta: f64,
    pub a_const: f64,
    pub b_const: f64,
    pub bound: ArgBound,
}

impl RegionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < core::f64::consts::FRAC_PI_2) {
            return Err(invalid("delta must lie in (0, pi/2)"));
        }
        if !(self.a_const > 0.0 && self.b_const > 0.0) {
            return Err(invalid("region constants must be positive"));
        }
        Ok(())
    }
}

/// `2(2n+1)/(2n+3)`; equals `6/5` for `n = 1`.
pub fn log_power_exponent(n: u32) -> f64 {
    let nf = f64::from(n);
    2.0 * (2.0 * nf + 1.0) / (2.0 * nf + 3.0)
}

/// `{|λ| > A, |arg λ| < bound - δ, |λ| ≥ B (log 1/ε)^{exponent}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRegion {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub exponent: f64,
    pub bound: ArgBound,
}

pub fn bound_region(spec: &RegionSpec, epsilon: f64, n: u32) -> Result<BoundRegion> {
    spec.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon must lie in (0, 1)"));
    }
    Ok(BoundRegion {
        a: spec.a_const,
        b: spec.b_const,
        delta: spec.delta,
        epsilon,
        exponent: log_power_exponent(n),
        bound: spec.bound,
    })
}

impl BoundRegion {
    pub fn radius(&self) -> f64 {
        (self.b * (1.0 / self.epsilon).ln().powf(self.exponent)).max(self.a)
    }

    pub fn contains(&self, lambda: Complex64) -> bool {
        let r = lambda.norm();
        r > self.a && in_region_with(lambda, self.delta, self.bound) && r >= self.b * (1.0 / self.epsilon).ln().powf(self.exponent)
    }

    /// Boundary polyline: the ray at `-θ_max`, the arc of radius `radius()`,
    /// and the ray at `+θ_max`, each ray running out to `outer` times the radius.
    pub fn boundary(&self, count: usize, outer: f64) -> Vec<Complex64> {
        let theta = max_unit_argument(self.delta, self.bound);
        let r = self.radius();
        let count = count.max(2);
        let mut out = Vec::with_capacity(3 * count);
        for k in 0..count {
            let s = outer - (outer - 1.0) * k as f64 / (count - 1) as f64;
            out.push(Complex64::from_polar(r * s, -theta));
        }
        for k in 1..count - 1 {
            let t = -theta + 2.0 * theta * k as f64 / (count - 1) as f64;
            out.push(Complex64::from_polar(r, t));
        }
        for k in 0..count {
            let s = 1.0 + (outer - 1.0) * k as f64 / (count - 1) as f64;
            out.push(Complex64::from_polar(r * s, theta));
        }
        out
    }
}

/// Largest `B` (times `margin`) with `|λ_j| ≥ B (log 1/ε_j)^{exponent}` for
/// every frontier point with `ε_j < 1`.
pub fn calibrate_b(points: &[(f64, f64)], exponent: f64, margin: f64) -> Result<f64> {
    let b = points
        .iter()
        .filter(|(eps, _)| *eps > 0.0 && *eps < 1.0)
        .map(|&(eps, r)| r / (1.0 / eps).ln().powf(exponent))
        .fold(f64::INFINITY, f64::min);
    if !b.is_finite() {
        return Err(Error::InsufficientData(alloc::string::String::from("no frontier point with epsilon < 1")));
    }
    Ok(b * margin)
}

/// A pseudomode carried back to the physical operator.
#[derive(Debug, Clone, PartialEq)]
pub struct UnscaledMode {
    pub lambda_phys: Complex64,
    pub samples: GridFunction,
    pub residual_phys: f64,
}

impl UnscaledMode {
    /// `log(1/residual_phys) - log(h^{2(2n+1)/(2n+3)} C^{1/h})`; positive when
    /// the resolvent lower bound `‖(H - λ)^{-1}‖ > h^{e} C^{1/h}` is met.
    pub fn inequality_margin(&self, params: &ScalingParams, c: f64) -> f64 {
        let e = log_power_exponent(params.n);
        -self.residual_phys.ln() - (e * params.h.ln() + c.ln() / params.h)
    }
}

/// `λ ↦ τ^{2n+1}λ`, `ψ ↦ τ^{-1/2}ψ(x/τ)` and residual `τ^{2n+1}·ratio`.
pub fn unscale_pseudomode(mode: &WkbPseudomode, params: &ScalingParams) -> Result<UnscaledMode> {
    let rel = (mode.h - params.h).abs() / params.h;
    if rel > 1e-12 {
        return Err(Error::ScalingMismatch { mode: mode.h, params: params.h });
    }
    let ratio = mode
        .residual
        .map(|r| r.ratio)
        .ok_or_else(|| invalid("pseudomode has no certified residual"))?;
    let tau = params.tau;
    let nodes: Vec<f64> = mode.samples.nodes().iter().map(|x| tau * x).collect();
    let scale = tau.powf(-0.5);
    let values = mode.samples.values().iter().map(|v| v * scale).collect();
    let weights = mode.samples.weights().iter().map(|w| w * tau).collect();
    Ok(UnscaledMode {
        lambda_phys: params.to_physical(mode.lambda),
        samples: GridFunction::new(nodes, values, weights)?,
        residual_phys: params.energy_scale() * ratio,
    })
}

/// Relative defect of `H f = τ^{2n+1} U^{-1} H_h U f` for `f = Σ v_k ψ_k`.
///
/// The left side is exact in the Hermite basis; the right side applies the
/// finite-difference `H_h` to samples of `Uf` on `nodes` points of `x/τ ∈
/// [-half_width/τ, half_width/τ]`.
pub fn operator_identity_defect(spec: &PotentialSpec, tau: f64, coeffs: &[Complex64], half_width: f64, nodes: usize) -> Result<f64> {
    let phys = spec.physical();
    let params = ScalingParams::from_tau(tau, phys.n)?;
    let semi = phys.with_h(params.h)?;
    let n = coeffs.len();
    let p = phys.odd_power() as usize;
    let a = build_hamiltonian(&phys, n + 2 * p)?;
    let mut v = coeffs.to_vec();
    v.resize(n + 2 * p, Complex64::new(0.0, 0.0));
    let av = a.matvec(&v);
    let s_nodes = crate::grid::uniform_nodes(-half_width / tau, half_width / tau, nodes);
    let x_nodes: Vec<f64> = s_nodes.iter().map(|s| tau * s).collect();
    let lhs = synthesize(&av, &x_nodes);
    let f = synthesize(coeffs, &x_nodes);
    let uf = GridFunction::with_trapezoid(s_nodes, f.iter().map(|z| z * tau.sqrt()).collect())?;
    let huf = apply_hamiltonian(&semi, &uf)?;
    let scale = params.energy_scale() / tau.sqrt();
    let mut worst = 0.0f64;
    let mut size = 0.0f64;
    for (l, r) in lhs.iter().zip(huf.values()) {
        worst = worst.max((l - r * scale).norm());
        size = size.max(l.norm());
    }
    Ok(worst / size)
}

/// Coefficients with independent uniform real and imaginary parts in `[-1, 1]`.
pub fn random_coefficients(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = || 2.0 * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64) - 1.0;
    (0..n).map(|_| Complex64::new(unit(), unit())).collect()
}
