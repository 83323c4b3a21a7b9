//! Marching-squares isolines of `log10 ‖(A-λ)^{-1}‖` at levels `log10(1/ε)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::pseudospectrum::ResolventGrid;

/// Cap applied to `log10` of infinite (at-eigenvalue) values.
const LOG_CAP: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub vertices: Vec<Complex64>,
    pub closed: bool,
}

/// Isolines per level; `polylines[k]` belongs to `epsilon_levels[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSet {
    pub epsilon_levels: Vec<f64>,
    pub polylines: Vec<Vec<Polyline>>,
}

/// Scalar field on a rectangular lattice, `f[iy * nx + ix]`.
struct Field<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    f: &'a [f64],
}

impl Field<'_> {
    fn nx(&self) -> usize {
        self.xs.len()
    }

    fn at(&self, ix: usize, iy: usize) -> f64 {
        self.f[iy * self.nx() + ix]
    }
}

/// Edge identifiers: horizontal edges first, then vertical ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

fn edge_point(field: &Field, e: Edge, level: f64) -> Complex64 {
    let (a, b, pa, pb) = match e {
        Edge::H(ix, iy) => (
            field.at(ix, iy),
            field.at(ix + 1, iy),
            Complex64::new(field.xs[ix], field.ys[iy]),
            Complex64::new(field.xs[ix + 1], field.ys[iy]),
        ),
        Edge::V(ix, iy) => (
            field.at(ix, iy),
            field.at(ix, iy + 1),
            Complex64::new(field.xs[ix], field.ys[iy]),
            Complex64::new(field.xs[ix], field.ys[iy + 1]),
        ),
    };
    let t = ((level - a) / (b - a)).clamp(0.0, 1.0);
    pa + (pb - pa) * t
}

/// Segments of one cell as pairs of crossed edges.
fn cell_segments(field: &Field, ix: usize, iy: usize, level: f64, out: &mut Vec<(Edge, Edge)>) {
    let v = [field.at(ix, iy), field.at(ix + 1, iy), field.at(ix + 1, iy + 1), field.at(ix, iy + 1)];
    let inside = v.map(|x| x > level);
    let bottom = Edge::H(ix, iy);
    let right = Edge::V(ix + 1, iy);
    let top = Edge::H(ix, iy + 1);
    let left = Edge::V(ix, iy);
    let crossed: Vec<Edge> = [(0, 1, bottom), (1, 2, right), (3, 2, top), (0, 3, left)]
        .iter()
        .filter(|(a, b, _)| inside[*a] != inside[*b])
        .map(|t| t.2)
        .collect();
    match crossed.len() {
        2 => out.push((crossed[0], crossed[1])),
        4 => {
            let center = 0.25 * (v[0] + v[1] + v[2] + v[3]) > level;
            if center == inside[0] {
                // Corners 0 and 2 connect through the center.
                out.push((bottom, right));
                out.push((top, left));
            } else {
                out.push((left, bottom));
                out.push((right, top));
            }
        }
        _ => {}
    }
}

fn trace(field: &Field, level: f64) -> Vec<Polyline> {
    let mut segments = Vec::new();
    for iy in 0..field.ys.len() - 1 {
        for ix in 0..field.nx() - 1 {
            cell_segments(field, ix, iy, level, &mut segments);
        }
    }
    let mut incident: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(k);
        incident.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let walk = |start_edge: Edge, first: usize, used: &mut Vec<bool>| -> (Vec<Edge>, bool) {
        let mut chain = vec![start_edge];
        let mut seg = first;
        let mut at = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            chain.push(next);
            at = next;
            if next == start_edge {
                return (chain, true);
            }
            match incident[&next].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => return (chain, false),
            }
        }
    };
    let ends: Vec<Edge> = incident.iter().filter(|(_, s)| s.len() == 1).map(|(e, _)| *e).collect();
    for e in ends {
        let s = incident[&e][0];
        if !used[s] {
            let (chain, closed) = walk(e, s, &mut used);
            lines.push((chain, closed));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            let (chain, closed) = walk(segments[k].0, k, &mut used);
            lines.push((chain, closed));
        }
    }
    lines
        .into_iter()
        .map(|(chain, closed)| {
            let mut vertices: Vec<Complex64> = chain.iter().map(|&e| edge_point(field, e, level)).collect();
            if closed {
                vertices.pop();
            }
            Polyline { vertices, closed }
        })
        .collect()
}

fn log_field(grid: &ResolventGrid) -> Vec<f64> {
    grid.values.iter().map(|&v| if v.is_finite() { v.log10().min(LOG_CAP) } else { LOG_CAP }).collect()
}

pub fn extract_contours(grid: &ResolventGrid, epsilons: &[f64]) -> Result<ContourSet> {
    if epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(invalid("epsilon levels must be positive"));
    }
    let f = log_field(grid);
    let field = Field { xs: &grid.re_axis, ys: &grid.im_axis, f: &f };
    let polylines = epsilons.iter().map(|&e| trace(&field, -e.log10())).collect();
    Ok(ContourSet { epsilon_levels: epsilons.to_vec(), polylines })
}

/// Even-odd membership in the region bounded by closed polygons.
pub fn point_in_polygons(p: Complex64, polygons: &[Polyline]) -> bool {
    let mut inside = false;
    for poly in polygons {
        let v = &poly.vertices;
        let n = v.len();
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            if (a.im > p.im) != (b.im > p.im) {
                let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if p.re < x {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

/// Closed isolines of the grid field surrounded by a ring of values below every
/// level, so regions touching the window boundary are closed along it.
pub fn closed_regions(grid: &ResolventGrid, epsilon: f64) -> Vec<Polyline> {
    let nx = grid.nx();
    let ny = grid.ny();
    let f = log_field(grid);
    let dx = grid.re_axis[1] - grid.re_axis[0];
    let dy = grid.im_axis[1] - grid.im_axis[0];
    let mut xs = vec![grid.re_axis[0] - dx];
    xs.extend_from_slice(&grid.re_axis);
    xs.push(grid.re_axis[nx - 1] + dx);
    let mut ys = vec![grid.im_axis[0] - dy];
    ys.extend_from_slice(&grid.im_axis);
    ys.push(grid.im_axis[ny - 1] + dy);
    let level = -epsilon.log10();
    let low = f.iter().copied().fold(level, f64::min) - 1.0;
    let mut padded = vec![low; (nx + 2) * (ny + 2)];
    for iy in 0..ny {
        for ix in 0..nx {
            padded[(iy + 1) * (nx + 2) + ix + 1] = f[iy * nx + ix];
        }
    }
    let field = Field { xs: &xs, ys: &ys, f: &padded };
    trace(&field, level)
}

/// Result of the nesting check between consecutive levels.
#[derive(Debug, Clone, PartialEq)]
pub struct NestingReport {
    pub samples: usize,
    pub violations: usize,
}

/// Checks `σ_{ε₁} ⊂ σ_{ε₂}` for every pair of consecutive sorted levels by
/// point-in-polygon tests at the cell centers of the grid.
pub fn nesting_check(grid: &ResolventGrid, epsilons: &[f64]) -> NestingReport {
    let mut levels = epsilons.to_vec();
    levels.sort_by(f64::total_cmp);
    let regions: Vec<Vec<Polyline>> = levels.iter().map(|&e| closed_regions(grid, e)).collect();
    let mut samples = 0;
    let mut violations = 0;
    for iy in 0..grid.ny() - 1 {
        for ix in 0..grid.nx() - 1 {
            let p = Complex64::new(
                0.5 * (grid.re_axis[ix] + grid.re_axis[ix + 1]),
                0.5 * (grid.im_axis[iy] + grid.im_axis[iy + 1]),
            );
            let member: Vec<bool> = regions.iter().map(|r| point_in_polygons(p, r)).collect();
            for w in member.windows(2) {
                samples += 1;
                if w[0] && !w[1] {
                    violations += 1;
                }
            }
        }
    }
    NestingReport { samples, violations }
}

/// Whether every polyline of a level is closed or ends on the window boundary.
pub fn polylines_well_formed(grid: &ResolventGrid, lines: &[Polyline]) -> bool {
    let w = grid.window();
    let tol = 1e-9 * (w.re_max - w.re_min).max(w.im_max - w.im_min);
    let on_boundary = |z: Complex64| {
        (z.re - w.re_min).abs() <= tol
            || (z.re - w.re_max).abs() <= tol
            || (z.im - w.im_min).abs() <= tol
            || (z.im - w.im_max).abs() <= tol
    };
    let inside = |z: Complex64| {
        z.re >= w.re_min - tol && z.re <= w.re_max + tol && z.im >= w.im_min - tol && z.im <= w.im_max + tol
    };
    lines.iter().all(|l| {
        l.vertices.iter().all(|&z| inside(z))
            && (l.closed || (on_boundary(l.vertices[0]) && on_boundary(*l.vertices.last().unwrap())))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banded::Banded;
    use crate::pseudospectrum::{sweep_grid, Window};

    fn scalar_grid() -> ResolventGrid {
        let mut a = Banded::zeros(1, 0);
        a.set(0, 0, Complex64::new(2.0, 0.0));
        let w = Window { re_min: 1.75, re_max: 2.25, im_min: -0.25, im_max: 0.25, nx: 101, ny: 101 };
        sweep_grid(&a, &w).unwrap()
    }

    #[test]
    fn scalar_resolvent_gives_circle() {
        let g = scalar_grid();
        let c = extract_contours(&g, &[0.1]).unwrap();
        assert_eq!(c.polylines[0].len(), 1);
        let line = &c.polylines[0][0];
        assert!(line.closed);
        let cell = 0.005;
        for z in &line.vertices {
            assert!(((z - Complex64::new(2.0, 0.0)).norm() - 0.1).abs() < cell);
        }
        assert!(polylines_well_formed(&g, &c.polylines[0]));
    }

    #[test]
    fn uncrossed_level_is_empty() {
        let g = scalar_grid();
        let min_inv = g.values.iter().copied().fold(f64::INFINITY, f64::min);
        let c = extract_contours(&g, &[1.1 / min_inv]).unwrap();
        assert!(c.polylines[0].is_empty());
    }

    #[test]
    fn open_contours_end_on_boundary() {
        let g = scalar_grid();
        // ε = 0.3 circle is larger than the window: arcs cut by the box.
        let c = extract_contours(&g, &[0.3, 0.28]).unwrap();
        for lines in &c.polylines {
            assert!(lines.iter().all(|l| !l.closed));
            assert!(polylines_well_formed(&g, lines));
        }
    }

    #[test]
    fn nested_circles() {
        let g = scalar_grid();
        let levels = [0.05, 0.1, 0.15, 0.2, 0.3];
        let r = nesting_check(&g, &levels);
        assert_eq!(r.violations, 0);
        assert!(r.samples > 0);
        let inner = closed_regions(&g, 0.1);
        assert!(point_in_polygons(Complex64::new(2.0, 0.0), &inner));
        assert!(!point_in_polygons(Complex64::new(2.2, 0.2), &inner));
    }

    #[test]
    fn saddle_uses_center_average() {
        // Two bumps on the diagonal of one cell.
        let xs = [0.0, 1.0];
        let ys = [0.0, 1.0];
        let f = [1.0, 0.0, 0.0, 1.0];
        let field = Field { xs: &xs, ys: &ys, f: &f };
        let mut segs = Vec::new();
        cell_segments(&field, 0, 0, 0.4, &mut segs);
        assert_eq!(segs, vec![(Edge::H(0, 0), Edge::V(1, 0)), (Edge::H(0, 1), Edge::V(0, 0))]);
        segs.clear();
        cell_segments(&field, 0, 0, 0.6, &mut segs);
        assert_eq!(segs, vec![(Edge::V(0, 0), Edge::H(0, 0)), (Edge::V(1, 0), Edge::H(0, 1))]);
    }
}
