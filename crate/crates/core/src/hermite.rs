//! Normalized Hermite functions `ψ_k(x) = (2^k k! √π)^{-1/2} H_k(x) e^{-x²/2}`,
//! the eigenfunctions of `-d²/dx² + x²` with eigenvalues `2k+1`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::GridFunction;

/// `ψ_0(x), …, ψ_{m-1}(x)` by the stable three-term recurrence.
pub fn hermite_functions(x: f64, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    if m == 0 {
        return out;
    }
    out[0] = core::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if m > 1 {
        out[1] = core::f64::consts::SQRT_2 * x * out[0];
    }
    for k in 1..m.saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
    out
}

/// `Σ_k c_k ψ_k(x)` at every node.
pub fn synthesize(coeffs: &[Complex64], nodes: &[f64]) -> Vec<Complex64> {
    nodes
        .iter()
        .map(|&x| {
            hermite_functions(x, coeffs.len())
                .iter()
                .zip(coeffs)
                .fold(Complex64::new(0.0, 0.0), |acc, (p, c)| acc + c * *p)
        })
        .collect()
}

/// Coefficients `⟨ψ_k, f⟩`, `k < m`, using the grid's quadrature weights.
pub fn project(f: &GridFunction, m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for ((&x, &v), &w) in f.nodes().iter().zip(f.values()).zip(f.weights()) {
        if v.norm() == 0.0 {
            continue;
        }
        for (o, p) in out.iter_mut().zip(hermite_functions(x, m)) {
            *o += v * (w * p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_by_quadrature() {
        let m = 12;
        let h = 0.01;
        let mut gram = vec![vec![0.0; m]; m];
        for i in 0..=2400 {
            let x = -12.0 + h * i as f64;
            let p = hermite_functions(x, m);
            for a in 0..m {
                for b in 0..m {
                    gram[a][b] += h * p[a] * p[b];
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a][b] - e).abs() < 1e-12, "({a},{b}) = {}", gram[a][b]);
            }
        }
    }

    #[test]
    fn project_then_synthesize_round_trips() {
        let coeffs: Vec<Complex64> = (0..8).map(|k| Complex64::new(1.0 / (k as f64 + 1.0), 0.1 * k as f64)).collect();
        let g = GridFunction::uniform(-14.0, 14.0, 4001, |x| synthesize(&coeffs, &[x])[0]);
        let back = project(&g, 8);
        for (a, b) in back.iter().zip(&coeffs) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
