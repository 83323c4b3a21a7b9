//! Square banded matrices and a banded LU factorization with partial pivoting.
//!
//! Storage is row-major over the band: row `i` keeps the `2w+1` entries with
//! column offsets `-w..=w`. Entries that fall outside the matrix are stored as
//! zero and never read.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// What row `k` of a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// Row `k` is the `k`-th eigenfunction of `-d²/dx² + x²`.
    Hermite,
    Unspecified,
}

impl BasisTag {
    pub fn label(&self) -> &'static str {
        match self {
            BasisTag::Hermite => "hermite",
            BasisTag::Unspecified => "unspecified",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Banded<T> {
    dim: usize,
    bandwidth: usize,
    data: Vec<T>,
    pub basis_tag: BasisTag,
}

pub type BandedComplexMatrix = Banded<Complex64>;
pub type BandedRealMatrix = Banded<f64>;

impl<T> Banded<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<Output = T>,
{
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        let width = 2 * bandwidth + 1;
        Banded { dim, bandwidth, data: vec![T::zero(); dim * width], basis_tag: BasisTag::Unspecified }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn width(&self) -> usize {
        2 * self.bandwidth + 1
    }

    #[inline]
    fn in_band(&self, row: usize, col: usize) -> bool {
        row < self.dim && col < self.dim && row.abs_diff(col) <= self.bandwidth
    }

    #[inline]
    fn slot(&self, row: usize, col: usize) -> usize {
        row * self.width() + (col + self.bandwidth - row)
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        if self.in_band(row, col) {
            self.data[self.slot(row, col)]
        } else {
            T::zero()
        }
    }

    /// Panics if `(row, col)` lies outside the band.
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        assert!(self.in_band(row, col), "({row}, {col}) outside band {}", self.bandwidth);
        let s = self.slot(row, col);
        self.data[s] = value;
    }

    /// Column range stored for `row`, clipped to the matrix.
    pub fn row_range(&self, row: usize) -> core::ops::Range<usize> {
        let lo = row.saturating_sub(self.bandwidth);
        let hi = (row + self.bandwidth + 1).min(self.dim);
        lo..hi
    }

    /// Stored entries `(row, col, value)` in row-major band order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.dim).flat_map(move |r| self.row_range(r).map(move |c| (r, c, self.get(r, c))))
    }

    /// Product with ascending summation over the shared index; entries of the
    /// result depend only on the operand entries they touch, not on `dim`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let bw = self.bandwidth + other.bandwidth;
        let mut out = Banded::zeros(self.dim, bw);
        out.basis_tag = self.basis_tag;
        for i in 0..self.dim {
            for j in out.row_range(i) {
                let lo = self.row_range(i).start.max(other_col_lo(other, j));
                let hi = self.row_range(i).end.min(other_col_hi(other, j));
                let mut acc = T::zero();
                for l in lo..hi {
                    acc = acc + self.get(i, l) * other.get(l, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Leading `dim × dim` block.
    pub fn truncate(&self, dim: usize) -> Self {
        assert!(dim <= self.dim);
        let mut out = Banded::zeros(dim, self.bandwidth);
        out.basis_tag = self.basis_tag;
        for i in 0..dim {
            for j in out.row_range(i) {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    pub fn map<U, F>(&self, f: F) -> Banded<U>
    where
        U: Copy + Zero + Add<Output = U> + Mul<Output = U>,
        F: Fn(T) -> U,
    {
        Banded {
            dim: self.dim,
            bandwidth: self.bandwidth,
            data: self.data.iter().map(|&v| f(v)).collect(),
            basis_tag: self.basis_tag,
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = T::zero();
                for j in self.row_range(i) {
                    acc = acc + self.get(i, j) * x[j];
                }
                acc
            })
            .collect()
    }
}

fn other_col_lo<T>(m: &Banded<T>, col: usize) -> usize {
    col.saturating_sub(m.bandwidth)
}

fn other_col_hi<T>(m: &Banded<T>, col: usize) -> usize {
    (col + m.bandwidth + 1).min(m.dim)
}

impl Banded<f64> {
    pub fn to_complex(&self) -> BandedComplexMatrix {
        self.map(|v| Complex64::new(v, 0.0))
    }
}

impl BandedComplexMatrix {
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// `A - λI`.
    pub fn shifted(&self, lambda: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            let v = out.get(i, i) - lambda;
            out.set(i, i, v);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Banded::zeros(self.dim, self.bandwidth);
        out.basis_tag = self.basis_tag;
        for (r, c, v) in self.entries() {
            out.set(c, r, v.conj());
        }
        out
    }

    /// Largest modulus among stored entries.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest absolute row sum (the induced ∞-norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row_range(i).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Smallest `w` such that all entries with `|row - col| > w` are exactly zero.
    pub fn effective_bandwidth(&self) -> usize {
        self.entries()
            .filter(|(_, _, v)| !v.is_zero())
            .map(|(r, c, _)| r.abs_diff(c))
            .max()
            .unwrap_or(0)
    }

    /// Rebuild from dense storage, checking that nothing lies outside the band.
    pub fn from_dense(m: &DMatrix<Complex64>, bandwidth: usize) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(crate::error::invalid("matrix must be square"));
        }
        let mut out = Banded::zeros(n, bandwidth);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if i.abs_diff(j) <= bandwidth {
                    out.set(i, j, v);
                } else if !v.is_zero() {
                    return Err(Error::DimensionTooSmall { dim: n, bandwidth });
                }
            }
        }
        Ok(out)
    }
}

/// LU factorization `PA = LU` of a complex banded matrix with row pivoting.
///
/// The upper factor has bandwidth up to `2w` after fill-in.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<Complex64>,
    pivots: Vec<usize>,
    singular: bool,
    min_pivot: f64,
}

impl BandLu {
    pub fn factor(a: &BandedComplexMatrix) -> Self {
        let n = a.dim();
        let kl = a.bandwidth();
        let ku = 2 * kl;
        let width = kl + ku + 1;
        let mut ab = vec![Complex64::zero(); n * width];
        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        for (r, c, v) in a.entries() {
            ab[idx(r, c)] = v;
        }
        let mut pivots = vec![0; n];
        let mut singular = false;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = ab[idx(k, k)].norm();
            for i in k + 1..=last_row {
                let v = ab[idx(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            min_pivot = min_pivot.min(best);
            let last_col = (k + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    ab.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = ab[idx(k, k)];
            if pivot.is_zero() {
                singular = true;
                continue;
            }
            let inv = pivot.inv();
            for i in k + 1..=last_row {
                let l = ab[idx(i, k)] * inv;
                ab[idx(i, k)] = l;
                if !l.is_zero() {
                    for j in k + 1..=last_col {
                        let u = ab[idx(k, j)];
                        ab[idx(i, j)] -= l * u;
                    }
                }
            }
        }
        BandLu { n, kl, ku, ab, pivots, singular, min_pivot }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.ab[i * (self.kl + self.ku + 1) + (j + self.kl - i)]
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if !bk.is_zero() {
                for i in k + 1..=(k + self.kl).min(n - 1) {
                    b[i] -= self.at(i, k) * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + self.ku).min(n - 1) {
                acc -= self.at(k, j) * b[j];
            }
            b[k] = acc / self.at(k, k);
        }
    }

    /// Solve `A† x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        // U† y = b, forward.
        for k in 0..n {
            let mut acc = b[k];
            for i in k.saturating_sub(self.ku)..k {
                acc -= self.at(i, k).conj() * b[i];
            }
            b[k] = acc / self.at(k, k).conj();
        }
        // Undo the elimination steps in reverse order.
        for k in (0..n).rev() {
            let mut acc = b[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                acc -= self.at(i, k).conj() * b[i];
            }
            b[k] = acc;
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_banded(n: usize, w: usize, seed: u64) -> BandedComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Banded::zeros(n, w);
        for i in 0..n {
            for j in m.row_range(i) {
                m.set(i, j, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        m
    }

    #[test]
    fn entries_outside_band_read_as_zero() {
        let mut m: BandedRealMatrix = Banded::zeros(5, 1);
        m.set(2, 3, 4.0);
        assert_eq!(m.get(2, 3), 4.0);
        assert_eq!(m.get(0, 4), 0.0);
        assert_eq!(m.get(7, 7), 0.0);
    }

    #[test]
    fn band_product_matches_dense_product() {
        let a = random_banded(12, 2, 1);
        let b = random_banded(12, 3, 2);
        let c = a.matmul(&b);
        assert_eq!(c.bandwidth(), 5);
        let dense = a.to_dense() * b.to_dense();
        assert!((c.to_dense() - dense).norm() < 1e-12);
    }

    #[test]
    fn lu_solves_and_adjoint_solves() {
        let a = random_banded(40, 3, 7);
        let lu = BandLu::factor(&a);
        assert!(!lu.is_singular());
        let x: Vec<Complex64> = (0..40).map(|k| Complex64::new(k as f64, 1.0 - k as f64 * 0.5)).collect();
        let mut b = a.matvec(&x);
        lu.solve_in_place(&mut b);
        let err: f64 = b.iter().zip(&x).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "solve error {err}");

        let ah = a.adjoint();
        let mut b = ah.matvec(&x);
        lu.solve_adjoint_in_place(&mut b);
        let err: f64 = b.iter().zip(&x).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "adjoint solve error {err}");
    }

    #[test]
    fn exact_zero_pivot_is_reported() {
        let mut a: BandedComplexMatrix = Banded::zeros(3, 0);
        a.set(0, 0, Complex64::new(1.0, 0.0));
        a.set(2, 2, Complex64::new(2.0, 0.0));
        assert!(BandLu::factor(&a).is_singular());
    }

    #[test]
    fn dense_round_trip_rejects_out_of_band() {
        let a = random_banded(6, 1, 3);
        let d = a.to_dense();
        assert_eq!(BandedComplexMatrix::from_dense(&d, 1).unwrap(), a);
        assert!(BandedComplexMatrix::from_dense(&d, 0).is_err());
    }
}
