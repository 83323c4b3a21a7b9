//! `‖exp(-itA)‖` by Padé-13 scaling and squaring, carried in logarithmic form
//! because the norms of non-normal truncations outgrow `f64`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::banded::BandedComplexMatrix;
use crate::error::{invalid, Error, Result};

/// Norms above `10^300` are flagged as overflowing `f64`.
pub const OVERFLOW_LOG10: f64 = 300.0;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `exp(M) = e^{log_scale} · E` with `max |E_ij| = 1`.
#[derive(Debug, Clone)]
pub struct ScaledExp {
    pub mantissa: DMatrix<Complex64>,
    pub log_scale: f64,
}

pub fn expm_scaled(m: &DMatrix<Complex64>) -> Result<ScaledExp> {
    let n = m.nrows();
    let norm = one_norm(m);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let b = m * Complex64::new(2f64.powi(-s), 0.0);
    let c = |k: usize| Complex64::new(PADE13[k], 0.0);
    let id = DMatrix::<Complex64>::identity(n, n);
    let b2 = &b * &b;
    let b4 = &b2 * &b2;
    let b6 = &b4 * &b2;
    let inner_u = &b6 * (&b6 * c(13) + &b4 * c(11) + &b2 * c(9)) + &b6 * c(7) + &b4 * c(5) + &b2 * c(3) + &id * c(1);
    let u = &b * inner_u;
    let v = &b6 * (&b6 * c(12) + &b4 * c(10) + &b2 * c(8)) + &b6 * c(6) + &b4 * c(4) + &b2 * c(2) + &id * c(0);
    let mut e = (&v - &u).lu().solve(&(&v + &u)).ok_or(Error::EigenSolverFailed)?;
    let mut log_scale = 0.0;
    let renorm = |e: &mut DMatrix<Complex64>, log_scale: &mut f64| {
        let c = max_entry(e);
        *e /= Complex64::new(c, 0.0);
        *log_scale += c.ln();
    };
    renorm(&mut e, &mut log_scale);
    for _ in 0..s {
        e = &e * &e;
        log_scale *= 2.0;
        renorm(&mut e, &mut log_scale);
    }
    if e.iter().any(|z| !z.is_finite()) {
        return Err(invalid("matrix exponential produced non-finite entries"));
    }
    Ok(ScaledExp { mantissa: e, log_scale })
}

/// Largest singular value by power iteration on `M†M`.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    let n = m.ncols();
    let mut x = DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.618_034).fract(), 0.0));
    x /= Complex64::new(x.norm(), 0.0);
    let mut est = 0.0;
    for _ in 0..1000 {
        let y = m * &x;
        let z = m.adjoint() * &y;
        let zn = z.norm();
        if zn == 0.0 {
            return 0.0;
        }
        let new = zn.sqrt();
        x = z / Complex64::new(zn, 0.0);
        if (new - est).abs() <= 1e-14 * new {
            return new;
        }
        est = new;
    }
    est
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupCurve {
    pub matrix_dim: usize,
    pub times: Vec<f64>,
    /// `log10 ‖exp(-i t_j A)‖`.
    pub log10_norms: Vec<f64>,
    /// `log10_norms[j] > 300`.
    pub overflow: Vec<bool>,
}

impl SemigroupCurve {
    /// Norms as `f64`, infinite where they overflow.
    pub fn norms(&self) -> Vec<f64> {
        self.log10_norms.iter().map(|&l| if l > OVERFLOW_LOG10 { f64::INFINITY } else { 10f64.powf(l) }).collect()
    }

    pub fn sup_log10(&self) -> f64 {
        self.log10_norms.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `log10 ‖exp(-itA)‖` for a dense `A`.
pub fn log10_norm_at(dense: &DMatrix<Complex64>, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let e = expm_scaled(&(dense * Complex64::new(0.0, -t)))?;
    Ok(spectral_norm(&e.mantissa).log10() + e.log_scale / core::f64::consts::LN_10)
}

/// `t_j = j t_max / steps`, `j = 0..=steps`.
pub fn semigroup_curve(a: &BandedComplexMatrix, t_max: f64, steps: usize) -> Result<SemigroupCurve> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(invalid("t_max must be positive"));
    }
    if steps == 0 {
        return Err(invalid("steps must be positive"));
    }
    let dense = a.to_dense();
    let mut times = Vec::with_capacity(steps + 1);
    let mut log10_norms = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let t = t_max * j as f64 / steps as f64;
        times.push(t);
        if j == 0 {
            log10_norms.push(0.0);
            continue;
        }
        log10_norms.push(log10_norm_at(&dense, t)?);
    }
    let overflow = log10_norms.iter().map(|&l| l > OVERFLOW_LOG10).collect();
    Ok(SemigroupCurve { matrix_dim: a.dim(), times, log10_norms, overflow })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::build_hamiltonian;
    use crate::potential::PotentialSpec;

    #[test]
    fn exponential_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 3.0),
            Complex64::new(40.0, 0.0)
        ]));
        let e = expm_scaled(&m).unwrap();
        let scale = e.log_scale.exp();
        assert!((e.mantissa[(2, 2)].re * scale / 40f64.exp() - 1.0).abs() < 1e-12);
        let z = Complex64::new(-2.0, 3.0).exp();
        assert!((e.mantissa[(1, 1)] * scale - z).norm() < 1e-12 * z.norm());
    }

    #[test]
    fn nilpotent_exponential() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(100.0, 0.0);
        let e = expm_scaled(&m).unwrap();
        let scale = e.log_scale.exp();
        assert!((e.mantissa[(0, 1)] * scale - Complex64::new(100.0, 0.0)).norm() < 1e-9);
        assert!((e.mantissa[(0, 0)] * scale - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn unitary_group_for_hermitian_generator() {
        let a = build_hamiltonian(&PotentialSpec::new(0.0, 1).unwrap(), 40).unwrap();
        let c = semigroup_curve(&a, 5.0, 5).unwrap();
        assert_eq!(c.log10_norms[0], 0.0);
        for n in c.norms() {
            assert!((n - 1.0).abs() < 1e-10, "{n}");
        }
    }

    #[test]
    fn non_normal_growth_starts_at_one() {
        let a = build_hamiltonian(&PotentialSpec::cubic(), 30).unwrap();
        let c = semigroup_curve(&a, 1.0, 4).unwrap();
        assert_eq!(c.norms()[0], 1.0);
        assert!(c.sup_log10() > 0.0);
        assert!(c.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_times() {
        let a = build_hamiltonian(&PotentialSpec::cubic(), 10).unwrap();
        assert!(semigroup_curve(&a, 0.0, 4).is_err());
        assert!(semigroup_curve(&a, 1.0, 0).is_err());
    }
}
