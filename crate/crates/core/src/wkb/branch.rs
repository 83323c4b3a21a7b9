//! Square roots continued along a path instead of taken on the principal branch.

use num_complex::Complex64;

/// The square root of `q` closest to `reference`.
pub fn tracked_sqrt(q: Complex64, reference: Complex64) -> Complex64 {
    let s = q.sqrt();
    if (s - reference).norm() > (s + reference).norm() {
        -s
    } else {
        s
    }
}

/// Square roots of `values` continued outward from index `start`, where the
/// root `start_value` is prescribed.
pub fn track_from(values: &[Complex64], start: usize, start_value: Complex64) -> alloc::vec::Vec<Complex64> {
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); values.len()];
    out[start] = start_value;
    for k in start + 1..values.len() {
        out[k] = tracked_sqrt(values[k], out[k - 1]);
    }
    for k in (0..start).rev() {
        out[k] = tracked_sqrt(values[k], out[k + 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn continues_across_the_principal_cut() {
        // z² traced across the imaginary axis: principal roots jump, tracked ones do not.
        let path: Vec<Complex64> = (0..=40).map(|k| Complex64::from_polar(1.0, 1.0 + 0.05 * k as f64)).collect();
        let squares: Vec<Complex64> = path.iter().map(|z| z * z).collect();
        let roots = track_from(&squares, 0, path[0]);
        for (r, z) in roots.iter().zip(&path) {
            assert!((r - z).norm() < 1e-12);
        }
        let principal: Vec<Complex64> = squares.iter().map(|q| q.sqrt()).collect();
        assert!(principal.windows(2).any(|w| (w[1] - w[0]).norm() > 1.0));
    }

    #[test]
    fn picks_nearest_root() {
        let r = tracked_sqrt(Complex64::new(-1.0, -1e-12), Complex64::new(0.0, 1.0));
        assert!(r.im > 0.0);
    }
}
