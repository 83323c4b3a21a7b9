//! Resolvent-norm grids over rectangular windows of the complex plane.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::banded::BandedComplexMatrix;
use crate::error::{invalid, Error, Result};
use crate::resolvent::resolvent_norm;

/// Axis-aligned window `[re_min, re_max] × [im_min, im_max]` sampled by
/// `nx × ny` grid lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(invalid("grid needs at least 2 points per axis"));
        }
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || !(self.re_max > self.re_min) || !(self.im_max > self.im_min) {
            return Err(invalid("window bounds must be finite and increasing"));
        }
        Ok(())
    }

    pub fn re_axis(&self) -> Vec<f64> {
        crate::grid::uniform_nodes(self.re_min, self.re_max, self.nx)
    }

    pub fn im_axis(&self) -> Vec<f64> {
        crate::grid::uniform_nodes(self.im_min, self.im_max, self.ny)
    }

    /// Grid points in row-major order: imaginary index outer, real index inner.
    pub fn points(&self) -> Vec<Complex64> {
        let re = self.re_axis();
        self.im_axis().iter().flat_map(|&y| re.iter().map(move |&x| Complex64::new(x, y))).collect()
    }
}

/// Resolvent norms on a grid, `values[iy * nx + ix]` at `re_axis[ix] + i im_axis[iy]`.
/// Points at an eigenvalue hold `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub matrix_dim: usize,
    pub sweep_seconds: f64,
}

impl ResolventGrid {
    pub fn from_values(window: &Window, values: Vec<f64>, matrix_dim: usize) -> Result<Self> {
        window.validate()?;
        if values.len() != window.nx * window.ny {
            return Err(invalid("value count does not match the window"));
        }
        Ok(ResolventGrid { re_axis: window.re_axis(), im_axis: window.im_axis(), values, matrix_dim, sweep_seconds: 0.0 })
    }

    pub fn nx(&self) -> usize {
        self.re_axis.len()
    }

    pub fn ny(&self) -> usize {
        self.im_axis.len()
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx() + ix]
    }

    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(self.re_axis[ix], self.im_axis[iy])
    }

    pub fn window(&self) -> Window {
        Window {
            re_min: self.re_axis[0],
            re_max: self.re_axis[self.nx() - 1],
            im_min: self.im_axis[0],
            im_max: self.im_axis[self.ny() - 1],
            nx: self.nx(),
            ny: self.ny(),
        }
    }

    /// `(λ, value)` pairs in storage order.
    pub fn samples(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        (0..self.ny()).flat_map(move |iy| (0..self.nx()).map(move |ix| (self.point(ix, iy), self.value(ix, iy))))
    }

    /// Number of adjacent pairs violating `|s(λ₁) - s(λ₂)| ≤ |λ₁ - λ₂|` for
    /// `s = 1/value`.
    pub fn lipschitz_violations(&self) -> usize {
        let s = |ix, iy| 1.0 / self.value(ix, iy);
        let mut count = 0;
        for iy in 0..self.ny() {
            for ix in 0..self.nx() {
                let here = s(ix, iy);
                let mut check = |jx: usize, jy: usize| {
                    let d = (self.point(ix, iy) - self.point(jx, jy)).norm();
                    if (here - s(jx, jy)).abs() > d * (1.0 + 1e-9) + 1e-13 {
                        count += 1;
                    }
                };
                if ix + 1 < self.nx() {
                    check(ix + 1, iy);
                }
                if iy + 1 < self.ny() {
                    check(ix, iy + 1);
                }
            }
        }
        count
    }

    /// Largest relative deviation from `1/dist(λ, spectrum)`.
    pub fn distance_map_error(&self, spectrum: &[Complex64]) -> f64 {
        self.samples()
            .map(|(z, v)| {
                let d = spectrum.iter().map(|e| (z - e).norm()).fold(f64::INFINITY, f64::min);
                if d == 0.0 {
                    if v.is_infinite() { 0.0 } else { f64::INFINITY }
                } else {
                    (v * d - 1.0).abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Resolvent norm at a point, with `f64::INFINITY` at eigenvalues.
pub fn point_value(a: &BandedComplexMatrix, lambda: Complex64) -> Result<f64> {
    match resolvent_norm(a, lambda) {
        Ok(v) => Ok(v),
        Err(Error::AtEigenvalue(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Sequential sweep; the value at each point depends only on `A` and the point.
pub fn sweep_grid(a: &BandedComplexMatrix, window: &Window) -> Result<ResolventGrid> {
    window.validate()?;
    let values = window.points().into_iter().map(|z| point_value(a, z)).collect::<Result<Vec<_>>>()?;
    ResolventGrid::from_values(window, values, a.dim())
}

/// Points whose value changes by less than `rel_tol` between two truncation sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustReport {
    pub trusted: Vec<bool>,
    pub trusted_count: usize,
    /// Bounding box `(re_min, re_max, im_min, im_max)` of the trusted points.
    pub bounding_box: Option<(f64, f64, f64, f64)>,
    /// Largest `re` such that every point with `Re λ ≤ re` is trusted.
    pub trusted_re_max: Option<f64>,
}

pub fn trust_mask(coarse: &ResolventGrid, fine: &ResolventGrid, rel_tol: f64) -> Result<TrustReport> {
    if coarse.re_axis != fine.re_axis || coarse.im_axis != fine.im_axis {
        return Err(invalid("grids must share axes"));
    }
    let trusted: Vec<bool> = coarse
        .values
        .iter()
        .zip(&fine.values)
        .map(|(&a, &b)| if a.is_infinite() || b.is_infinite() { a == b } else { (a - b).abs() <= rel_tol * b.abs() })
        .collect();
    let mut bbox: Option<(f64, f64, f64, f64)> = None;
    for (k, &t) in trusted.iter().enumerate() {
        if t {
            let z = coarse.point(k % coarse.nx(), k / coarse.nx());
            bbox = Some(match bbox {
                None => (z.re, z.re, z.im, z.im),
                Some((a, b, c, d)) => (a.min(z.re), b.max(z.re), c.min(z.im), d.max(z.im)),
            });
        }
    }
    let mut trusted_re_max = None;
    for ix in 0..coarse.nx() {
        if (0..coarse.ny()).all(|iy| trusted[iy * coarse.nx() + ix]) {
            trusted_re_max = Some(coarse.re_axis[ix]);
        } else {
            break;
        }
    }
    let trusted_count = trusted.iter().filter(|&&t| t).count();
    Ok(TrustReport { trusted, trusted_count, bounding_box: bbox, trusted_re_max })
}
