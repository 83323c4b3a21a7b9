use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

/// A phase-space point `(x0, ξ0)` with `ξ0² + V_h(x0) = λ` and `ξ0 Im V_h'(x0) < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolPoint {
    pub x0: f64,
    pub xi0: f64,
    pub lambda: Complex64,
    pub h: f64,
}

impl SymbolPoint {
    /// `|ξ0² + V_h(x0) - λ| / |λ|`.
    pub fn symbol_defect(&self, spec: &PotentialSpec) -> f64 {
        (Complex64::new(self.xi0 * self.xi0, 0.0) + spec.potential_real(self.x0) - self.lambda).norm()
            / self.lambda.norm()
    }
}

/// Solves `Im λ = β x0^(2n+1)` (real root) and `ξ0 = -sgn(β) (Re λ - c_h x0²)^{1/2}`.
///
/// `spec` supplies `β, n`; its own `semiclassical_h` is replaced by `h`.
pub fn solve_turning_point(lambda: Complex64, h: f64, spec: &PotentialSpec) -> Result<SymbolPoint> {
    let sc = spec.with_h(h)?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(crate::error::invalid("lambda must be finite"));
    }
    if sc.beta == 0.0 {
        return Err(Error::DegeneratePoint { lambda, reason: "beta = 0 gives Im V' = 0 everywhere" });
    }
    if lambda.im == 0.0 {
        return Err(Error::DegeneratePoint { lambda, reason: "real lambda puts x0 = 0 where Im V' vanishes" });
    }
    let ratio = lambda.im / sc.beta;
    let x0 = ratio.signum() * ratio.abs().powf(1.0 / f64::from(sc.odd_power()));
    let kinetic = lambda.re - sc.quadratic_coefficient() * x0 * x0;
    if !(kinetic > 0.0) {
        return Err(Error::DegeneratePoint { lambda, reason: "Re lambda - c_h x0^2 <= 0 gives xi0 = 0" });
    }
    let xi0 = -sc.beta.signum() * kinetic.sqrt();
    Ok(SymbolPoint { x0, xi0, lambda, h })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_h_limit() {
        let p = solve_turning_point(Complex64::new(1.0, 1.0), 1e-40, &PotentialSpec::cubic()).unwrap();
        assert!((p.x0 - 1.0).abs() < 1e-15);
        assert!((p.xi0 + 1.0).abs() < 1e-15);
    }

    #[test]
    fn real_lambda_is_degenerate() {
        let e = solve_turning_point(Complex64::new(5.0, 0.0), 0.01, &PotentialSpec::cubic());
        assert!(matches!(e, Err(Error::DegeneratePoint { .. })));
    }

    #[test]
    fn reference_point() {
        let spec = PotentialSpec::cubic();
        let lam = Complex64::new(2.0, 1.0);
        let p = solve_turning_point(lam, 0.01, &spec).unwrap();
        assert_eq!(p.x0, 1.0);
        assert!((p.xi0 + (2.0 - 0.01f64.powf(0.4)).sqrt()).abs() < 1e-15);
        assert!((p.xi0 + 1.357_02).abs() < 1e-5);
        let sc = spec.with_h(0.01).unwrap();
        assert!(p.symbol_defect(&sc) < 1e-15);
        // ξ0 Im V_h'(x0) < 0
        assert!(p.xi0 * sc.potential_derivative(Complex64::new(p.x0, 0.0)).im < 0.0);
    }

    #[test]
    fn too_far_left_is_degenerate() {
        let e = solve_turning_point(Complex64::new(0.1, 8.0), 0.5, &PotentialSpec::cubic());
        assert!(matches!(e, Err(Error::DegeneratePoint { .. })));
    }

    #[test]
    fn general_n_root() {
        let spec = PotentialSpec::new(2.0, 2).unwrap();
        let lam = Complex64::new(3.0, 64.0);
        let p = solve_turning_point(lam, 0.1, &spec).unwrap();
        assert!((2.0 * p.x0.powi(5) - 64.0).abs() < 1e-12);
        assert!(p.symbol_defect(&spec.with_h(0.1).unwrap()) < 1e-14);
    }
}
