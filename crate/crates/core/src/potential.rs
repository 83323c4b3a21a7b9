use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};

/// Parameters of `V(x) = x² + iβ x^(2n+1)`, or of the semiclassical family
/// `V_h(x) = h^((4n-2)/(2n+3)) x² + iβ x^(2n+1)` when `semiclassical_h` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub beta: f64,
    pub n: u32,
    pub semiclassical_h: Option<f64>,
}

impl PotentialSpec {
    pub fn new(beta: f64, n: u32) -> Result<Self> {
        let spec = PotentialSpec { beta, n, semiclassical_h: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn semiclassical(beta: f64, n: u32, h: f64) -> Result<Self> {
        let spec = PotentialSpec { beta, n, semiclassical_h: Some(h) };
        spec.validate()?;
        Ok(spec)
    }

    /// The oscillator `x² + i x³`.
    pub fn cubic() -> Self {
        PotentialSpec { beta: 1.0, n: 1, semiclassical_h: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        if !self.beta.is_finite() {
            return Err(invalid("beta must be a finite real number"));
        }
        if let Some(h) = self.semiclassical_h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(invalid("semiclassical h must be positive"));
            }
        }
        Ok(())
    }

    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::semiclassical(self.beta, self.n, h)
    }

    pub fn physical(&self) -> Self {
        PotentialSpec { semiclassical_h: None, ..*self }
    }

    /// Odd exponent `2n+1` of the imaginary term.
    pub fn odd_power(&self) -> u32 {
        2 * self.n + 1
    }

    /// Coefficient of the `-d²/dx²` term: `h²` or 1.
    pub fn kinetic_coefficient(&self) -> f64 {
        match self.semiclassical_h {
            Some(h) => h * h,
            None => 1.0,
        }
    }

    /// Coefficient of `x²`: `h^((4n-2)/(2n+3))` or 1.
    pub fn quadratic_coefficient(&self) -> f64 {
        match self.semiclassical_h {
            Some(h) => {
                let n = f64::from(self.n);
                h.powf((4.0 * n - 2.0) / (2.0 * n + 3.0))
            }
            None => 1.0,
        }
    }

    pub fn potential(&self, z: Complex64) -> Complex64 {
        let c = self.quadratic_coefficient();
        let odd = z.powu(self.odd_power());
        z * z * c + Complex64::i() * self.beta * odd
    }

    pub fn potential_derivative(&self, z: Complex64) -> Complex64 {
        let c = self.quadratic_coefficient();
        let p = self.odd_power();
        z * (2.0 * c) + Complex64::i() * (self.beta * f64::from(p)) * z.powu(p - 1)
    }

    pub fn potential_real(&self, x: f64) -> Complex64 {
        let c = self.quadratic_coefficient();
        Complex64::new(c * x * x, self.beta * x.powi(self.odd_power() as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_coefficient_for_cubic_family_is_h_to_two_fifths() {
        let s = PotentialSpec::semiclassical(1.0, 1, 0.01).unwrap();
        assert!((s.quadratic_coefficient() - 0.01f64.powf(0.4)).abs() < 1e-15);
        assert!((s.quadratic_coefficient() - 0.158_489_319_246_111_35).abs() < 1e-12);
        assert_eq!(PotentialSpec::cubic().quadratic_coefficient(), 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PotentialSpec::new(1.0, 0).is_err());
        assert!(PotentialSpec::semiclassical(1.0, 1, 0.0).is_err());
        assert!(PotentialSpec::semiclassical(1.0, 1, -1.0).is_err());
        assert!(PotentialSpec::new(f64::NAN, 1).is_err());
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let s = PotentialSpec::semiclassical(0.7, 2, 0.05).unwrap();
        let z = Complex64::new(0.8, -0.3);
        let d = 1e-6;
        let fd = (s.potential(z + d) - s.potential(z - d)) / (2.0 * d);
        assert!((fd - s.potential_derivative(z)).norm() < 1e-8);
    }
}
