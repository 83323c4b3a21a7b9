use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use super::branch::{track_from, tracked_sqrt};
use super::turning::SymbolPoint;
use super::Symbol;
use crate::chebyshev::{gauss_legendre, ChebGrid};
use crate::error::{Error, Result};

/// Parameters of the window-radius search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSearch {
    /// Largest radius tried.
    pub r_max: f64,
    /// The search fails below this radius.
    pub r_min: f64,
    /// Factor applied to the radius after each failed test.
    pub shrink: f64,
    /// Required bound `1/C ≤ |φ'| ≤ C` on the sampled disc.
    pub c_bound: f64,
    pub circles: usize,
    pub points_per_circle: usize,
    /// Uniform samples of the real window for the `Im φ'' > 0` test.
    pub real_samples: usize,
    /// Polynomial degree of the Chebyshev grid (nodes = degree + 1).
    pub degree: usize,
    /// Gauss–Legendre points per panel between adjacent Chebyshev nodes.
    pub quadrature_points: usize,
}

impl Default for WindowSearch {
    fn default() -> Self {
        WindowSearch {
            r_max: 2.0,
            r_min: 1e-2,
            shrink: 0.98,
            c_bound: 10.0,
            circles: 3,
            points_per_circle: 64,
            real_samples: 201,
            degree: 128,
            quadrature_points: 10,
        }
    }
}

/// Solution of the eikonal equation `(φ')² + V_h = λ` on the Chebyshev
/// window `[x0 - R0/2, x0 + R0/2]`, with `φ(x0) = 0` and `φ'(x0) = ξ0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction {
    pub point: SymbolPoint,
    pub grid: ChebGrid,
    pub r0: f64,
    /// `Im φ'' > 1/C2` on the window.
    pub c2: f64,
    pub phi: Vec<Complex64>,
    pub dphi: Vec<Complex64>,
    pub d2phi: Vec<Complex64>,
    /// `sqrt(φ')` continued from the principal root at `x0`.
    pub sqrt_dphi: Vec<Complex64>,
}

impl PhaseFunction {
    /// Assembles a phase from node samples; `sqrt_dphi` is tracked from the center.
    pub fn from_parts(
        point: SymbolPoint,
        grid: ChebGrid,
        r0: f64,
        c2: f64,
        phi: Vec<Complex64>,
        dphi: Vec<Complex64>,
        d2phi: Vec<Complex64>,
    ) -> Self {
        let c = grid.center_index();
        let sqrt_dphi = track_from(&dphi, c, dphi[c].sqrt());
        PhaseFunction { point, grid, r0, c2, phi, dphi, d2phi, sqrt_dphi }
    }

    pub fn lambda(&self) -> Complex64 {
        self.point.lambda
    }

    pub fn h(&self) -> f64 {
        self.point.h
    }

    /// `max |(φ')² + V - λ|` over the nodes.
    pub fn eikonal_residual<S: Symbol>(&self, sym: &S) -> f64 {
        self.grid
            .x
            .iter()
            .zip(&self.dphi)
            .map(|(&x, &d)| (d * d + sym.potential(Complex64::new(x, 0.0)) - self.lambda()).norm())
            .fold(0.0, f64::max)
    }

    pub fn min_im_d2phi(&self) -> f64 {
        self.d2phi.iter().map(|z| z.im).fold(f64::INFINITY, f64::min)
    }
}

fn real_window_d2phi<S: Symbol>(pt: &SymbolPoint, sym: &S, radius: f64, samples: usize) -> Vec<Complex64> {
    let half = samples / 2;
    let step = 0.5 * radius / half.max(1) as f64;
    let mut out = Vec::with_capacity(2 * half + 1);
    for side in [1.0, -1.0] {
        let mut reference = Complex64::new(pt.xi0, 0.0);
        for k in 0..=half {
            if side < 0.0 && k == 0 {
                continue;
            }
            let z = Complex64::new(pt.x0 + side * step * k as f64, 0.0);
            let d = if k == 0 { reference } else { tracked_sqrt(pt.lambda - sym.potential(z), reference) };
            reference = d;
            out.push(-sym.potential_derivative(z) / (d * 2.0));
        }
    }
    out
}

fn disc_ok<S: Symbol>(pt: &SymbolPoint, sym: &S, radius: f64, s: &WindowSearch) -> bool {
    let (lo, hi) = (1.0 / (s.c_bound * s.c_bound), s.c_bound * s.c_bound);
    for c in 1..=s.circles {
        let r = radius * c as f64 / s.circles as f64;
        for k in 0..s.points_per_circle {
            let theta = 2.0 * core::f64::consts::PI * k as f64 / s.points_per_circle as f64;
            let z = Complex64::new(pt.x0, 0.0) + Complex64::from_polar(r, theta);
            let q = (pt.lambda - sym.potential(z)).norm();
            if !(q > 0.0 && q >= lo && q <= hi) {
                return false;
            }
        }
    }
    real_window_d2phi(pt, sym, radius, s.real_samples).iter().all(|d| d.im > 0.0)
}

/// Largest admissible radius `R0 ≤ r_max` found by geometric shrinking.
pub fn select_radius<S: Symbol>(pt: &SymbolPoint, sym: &S, s: &WindowSearch) -> Result<f64> {
    let mut r = s.r_max;
    while r >= s.r_min {
        if disc_ok(pt, sym, r, s) {
            return Ok(r);
        }
        r *= s.shrink;
    }
    Err(Error::NoValidWindow { r_min: s.r_min, r_max: s.r_max })
}

pub fn build_phase<S: Symbol>(pt: &SymbolPoint, sym: &S, search: &WindowSearch) -> Result<PhaseFunction> {
    let r0 = select_radius(pt, sym, search)?;
    let grid = ChebGrid::new(pt.x0, 0.5 * r0, search.degree);
    let n = grid.len();
    let c = grid.center_index();
    let (gx, gw) = gauss_legendre(search.quadrature_points);
    let q = |x: f64| pt.lambda - sym.potential(Complex64::new(x, 0.0));
    let mut phi = vec![Complex64::zero(); n];
    let mut dphi = vec![Complex64::zero(); n];
    dphi[c] = Complex64::new(pt.xi0, 0.0);
    let panel = |from: usize, to: usize, phi: &mut Vec<Complex64>, dphi: &mut Vec<Complex64>| {
        let (a, b) = (grid.x[from], grid.x[to]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut reference = dphi[from];
        let mut acc = Complex64::zero();
        // With ascending Legendre nodes the points run from `a` towards `b`.
        for i in 0..gx.len() {
            let y = mid + half * gx[i];
            let s = tracked_sqrt(q(y), reference);
            reference = s;
            acc += s * gw[i];
        }
        phi[to] = phi[from] + acc * half;
        dphi[to] = tracked_sqrt(q(b), reference);
    };
    for k in c..n - 1 {
        panel(k, k + 1, &mut phi, &mut dphi);
    }
    for k in (1..=c).rev() {
        panel(k, k - 1, &mut phi, &mut dphi);
    }
    let d2phi: Vec<Complex64> = grid
        .x
        .iter()
        .zip(&dphi)
        .map(|(&x, &d)| -sym.potential_derivative(Complex64::new(x, 0.0)) / (d * 2.0))
        .collect();
    let dense_min = real_window_d2phi(pt, sym, r0, search.real_samples).iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
    let min_im = d2phi.iter().map(|z| z.im).fold(dense_min, f64::min);
    if !(min_im > 0.0) {
        return Err(Error::NoValidWindow { r_min: search.r_min, r_max: search.r_max });
    }
    let c2 = (1.0 + 1e-6) / min_im;
    Ok(PhaseFunction::from_parts(*pt, grid, r0, c2, phi, dphi, d2phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialSpec;
    use crate::wkb::turning::solve_turning_point;

    struct Flat;

    impl Symbol for Flat {
        fn potential(&self, _: Complex64) -> Complex64 {
            Complex64::zero()
        }
        fn potential_derivative(&self, _: Complex64) -> Complex64 {
            Complex64::zero()
        }
    }

    fn reference_phase(h: f64) -> (PhaseFunction, PotentialSpec) {
        let spec = PotentialSpec::cubic().with_h(h).unwrap();
        let pt = solve_turning_point(Complex64::new(2.0, 1.0), h, &spec).unwrap();
        (build_phase(&pt, &spec, &WindowSearch::default()).unwrap(), spec)
    }

    #[test]
    fn flat_potential_has_no_window() {
        let pt = SymbolPoint { x0: 0.3, xi0: -1.0, lambda: Complex64::new(1.0, 0.0), h: 0.1 };
        assert!(matches!(build_phase(&pt, &Flat, &WindowSearch::default()), Err(Error::NoValidWindow { .. })));
    }

    #[test]
    fn defining_conditions_at_center() {
        let (p, spec) = reference_phase(0.01);
        let c = p.grid.center_index();
        assert_eq!(p.grid.x[c], 1.0);
        assert_eq!(p.phi[c], Complex64::zero());
        assert_eq!(p.dphi[c], Complex64::new(p.point.xi0, 0.0));
        assert!(p.eikonal_residual(&spec) < 1e-10);
        let expect = 3.0 / (2.0 * (2.0 - 0.01f64.powf(0.4)).sqrt());
        assert!((p.d2phi[c].im - expect).abs() < 1e-12);
        assert!((p.d2phi[c].im - 1.105_36).abs() < 1e-5);
        assert!(p.min_im_d2phi() > 1.0 / p.c2);
        assert!(p.r0 > 0.5 && p.r0 <= 2.0);
    }

    #[test]
    fn phase_matches_its_derivative() {
        let (p, _) = reference_phase(0.02);
        let co = p.grid.coefficients(&p.phi);
        let d = p.grid.values(&p.grid.derivative(&co));
        for (a, b) in d.iter().zip(&p.dphi) {
            assert!((a - b).norm() < 1e-9);
        }
        // Branch continuity: no jumps between adjacent nodes.
        assert!(p.dphi.windows(2).all(|w| (w[1] - w[0]).norm() < 0.2));
        assert!(p.sqrt_dphi.windows(2).all(|w| (w[1] - w[0]).norm() < 0.2));
    }
}
