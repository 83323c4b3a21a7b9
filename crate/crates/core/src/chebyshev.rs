//! Chebyshev–Lobatto interpolation on `[c - L, c + L]`: coefficients by a
//! cosine transform, differentiation and integration in coefficient space.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;
#[allow(unused_imports)]
use num_traits::Float;

/// Trailing coefficients below this fraction of the largest one are dropped.
pub const CHOP_TOLERANCE: f64 = 1e-14;

/// Lobatto nodes `x_k = c + L t_k`, `t_k = sin(π(2k - N)/(2N))`, `k = 0..=N`,
/// increasing, symmetric, with `t_{N/2} = 0` exactly for even `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebGrid {
    pub center: f64,
    pub half_width: f64,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    cos_table: Vec<f64>,
}

impl ChebGrid {
    /// `degree + 1` nodes; `degree` must be even and at least 2.
    pub fn new(center: f64, half_width: f64, degree: usize) -> Self {
        assert!(degree >= 2 && degree % 2 == 0, "degree must be even and ≥ 2");
        let nf = degree as f64;
        let t: Vec<f64> = (0..=degree)
            .map(|k| (core::f64::consts::PI * (2.0 * k as f64 - nf) / (2.0 * nf)).sin())
            .collect();
        let x = t.iter().map(|&s| center + half_width * s).collect();
        let cos_table = (0..2 * degree).map(|q| (core::f64::consts::PI * q as f64 / nf).cos()).collect();
        ChebGrid { center, half_width, t, x, cos_table }
    }

    pub fn degree(&self) -> usize {
        self.t.len() - 1
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Index of the center node.
    pub fn center_index(&self) -> usize {
        self.degree() / 2
    }

    /// Chebyshev coefficients of the interpolant through `values`, chopped.
    pub fn coefficients(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.degree();
        assert_eq!(values.len(), n + 1);
        // t_k = cos(π (n - k) / n): sample j of the standard ordering is values[n - j].
        let mut c = vec![Complex64::zero(); n + 1];
        for (m, cm) in c.iter_mut().enumerate() {
            let mut acc = Complex64::zero();
            for j in 0..=n {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                acc += values[n - j] * (w * self.cos_table[(m * j) % (2 * n)]);
            }
            let scale = if m == 0 || m == n { 1.0 / n as f64 } else { 2.0 / n as f64 };
            *cm = acc * scale;
        }
        chop(&mut c);
        c
    }

    /// Values of a coefficient vector at the grid nodes.
    pub fn values(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.t.iter().map(|&t| clenshaw(coeffs, t)).collect()
    }

    /// Value at a point `x` of the interval.
    pub fn eval(&self, coeffs: &[Complex64], x: f64) -> Complex64 {
        clenshaw(coeffs, (x - self.center) / self.half_width)
    }

    /// Coefficients of `d/dx`.
    pub fn derivative(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut d = derivative_t(coeffs);
        let s = 1.0 / self.half_width;
        for v in d.iter_mut() {
            *v *= s;
        }
        d
    }

    /// Coefficients of the antiderivative in `x` vanishing at the center.
    pub fn integral(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut b = integral_t(coeffs);
        for v in b.iter_mut() {
            *v *= self.half_width;
        }
        b
    }
}

fn chop(c: &mut [Complex64]) {
    let max = c.iter().fold(0.0, |m: f64, z| m.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let tol = CHOP_TOLERANCE * max;
    let last = c.iter().rposition(|z| z.norm() > tol).unwrap_or(0);
    for z in c.iter_mut().skip(last + 1) {
        *z = Complex64::zero();
    }
}

/// `Σ c_k T_k(t)`.
pub fn clenshaw(c: &[Complex64], t: f64) -> Complex64 {
    let mut b1 = Complex64::zero();
    let mut b2 = Complex64::zero();
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * t) - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or_default() + b1 * t - b2
}

/// Coefficients of `d/dt` (same length, last entry zero).
pub fn derivative_t(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let mut d = vec![Complex64::zero(); n];
    if n < 2 {
        return d;
    }
    for k in (0..n - 1).rev() {
        let next = if k + 2 < n { d[k + 2] } else { Complex64::zero() };
        d[k] = next + c[k + 1] * (2.0 * (k + 1) as f64);
    }
    d[0] *= 0.5;
    d
}

/// Coefficients of the antiderivative in `t` vanishing at `t = 0` (one longer).
pub fn integral_t(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let get = |k: usize| if k < n { c[k] } else { Complex64::zero() };
    let mut b = vec![Complex64::zero(); n + 1];
    for (k, bk) in b.iter_mut().enumerate().skip(1) {
        let prev = if k == 1 { get(0) * 2.0 } else { get(k - 1) };
        *bk = (prev - get(k + 1)) / (2.0 * k as f64);
    }
    // T_k(0) = cos(kπ/2).
    let mut at_zero = Complex64::zero();
    for (k, bk) in b.iter().enumerate().skip(2).step_by(2) {
        at_zero += if k % 4 == 0 { *bk } else { -*bk };
    }
    b[0] = -at_zero;
    b
}

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
