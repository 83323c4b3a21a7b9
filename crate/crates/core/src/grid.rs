//! Sampled functions on the real line and the finite-difference applicator for
//! `-k d²/dx² + V`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::potential::PotentialSpec;

/// Complex samples on ordered real nodes, with matching quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<Complex64>,
    weights: Vec<f64>,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() != weights.len() {
            return Err(invalid("nodes, values and weights must have equal length"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("nodes must be strictly increasing"));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(invalid("quadrature weights must be positive"));
        }
        Ok(GridFunction { nodes, values, weights })
    }

    /// Samples with composite trapezoid weights.
    pub fn with_trapezoid(nodes: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        let weights = trapezoid_weights(&nodes);
        Self::new(nodes, values, weights)
    }

    /// `count` equispaced samples of `f` on `[a, b]` with trapezoid weights.
    pub fn uniform<F: Fn(f64) -> Complex64>(a: f64, b: f64, count: usize, f: F) -> Self {
        let nodes = uniform_nodes(a, b, count);
        let values = nodes.iter().map(|&x| f(x)).collect();
        let weights = trapezoid_weights(&nodes);
        GridFunction { nodes, values, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), self.nodes.len());
        GridFunction { nodes: self.nodes.clone(), values, weights: self.weights.clone() }
    }

    /// `(Σ w_i |f_i|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| w * v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Node spacing if the grid is uniform to relative tolerance `1e-9`.
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.nodes.len() < 2 {
            return None;
        }
        let n = self.nodes.len();
        let dx = (self.nodes[n - 1] - self.nodes[0]) / (n - 1) as f64;
        let scale = self.nodes[0].abs().max(self.nodes[n - 1].abs());
        let tol = 1e-9 * dx.abs() + 64.0 * f64::EPSILON * scale;
        let ok = self.nodes.windows(2).all(|w| ((w[1] - w[0]) - dx).abs() <= tol);
        ok.then_some(dx)
    }
}

pub fn uniform_nodes(a: f64, b: f64, count: usize) -> Vec<f64> {
    let dx = (b - a) / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { b } else { a + dx * i as f64 }).collect()
}

pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { nodes[i] - nodes[i - 1] } else { 0.0 };
            let right = if i + 1 < n { nodes[i + 1] - nodes[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Eighth-order centered stencil for the second derivative, offsets `-4..=4`.
const D2_STENCIL: [f64; 9] = [
    -1.0 / 560.0,
    8.0 / 315.0,
    -1.0 / 5.0,
    8.0 / 5.0,
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];

/// Tolerance below which boundary samples count as negligible.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Second derivative by the eighth-order stencil, treating samples beyond the
/// grid as zero.
pub fn second_derivative(values: &[Complex64], dx: f64) -> Vec<Complex64> {
    let n = values.len();
    let inv = 1.0 / (dx * dx);
    (0..n)
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, c) in D2_STENCIL.iter().enumerate() {
                let j = i as isize + s as isize - 4;
                if j >= 0 && (j as usize) < n {
                    acc += values[j as usize] * *c;
                }
            }
            acc * inv
        })
        .collect()
}

/// `(-k d²/dx² + V) f` with `k = h²` and `V = V_h` for semiclassical specs.
pub fn apply_hamiltonian(spec: &PotentialSpec, f: &GridFunction) -> Result<GridFunction> {
    spec.validate()?;
    if f.len() < 16 {
        return Err(Error::GridTooSmall(f.len()));
    }
    let dx = f.uniform_spacing().ok_or(Error::NonUniformGrid)?;
    let scale = f.sup_norm();
    let edge = f.values[0].norm().max(f.values[f.len() - 1].norm());
    if edge > BOUNDARY_TOLERANCE * scale.max(1.0) {
        return Err(Error::BoundaryNotNegligible(edge));
    }
    let k = spec.kinetic_coefficient();
    let d2 = second_derivative(&f.values, dx);
    let values = f
        .nodes
        .iter()
        .zip(&f.values)
        .zip(d2)
        .map(|((&x, &v), d)| -d * k + spec.potential_real(x) * v)
        .collect();
    Ok(f.with_values(values))
}
