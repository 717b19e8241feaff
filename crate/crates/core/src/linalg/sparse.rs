//! Sparse Hermitian operators, used as constraint-row coefficients.

use num_complex::Complex;

use super::matrix::CMatrix;
use super::HermitianOperator;
use crate::scalar::Scalar;

/// Hermitian operator stored as an explicit entry list.
///
/// Every nonzero entry is listed, including both `(i, j)` and `(j, i)` of a
/// conjugate pair, so inner products are plain sums over the list.
#[derive(Clone, Debug)]
pub struct SparseHerm<T: Scalar> {
    dim: usize,
    entries: Vec<(u32, u32, Complex<T>)>,
}

impl<T: Scalar> SparseHerm<T> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        let one = Complex::new(T::one(), T::zero());
        Self { dim, entries: (0..dim as u32).map(|i| (i, i, one)).collect() }
    }

    /// Collects the nonzero entries of a dense Hermitian operator.
    pub fn from_dense(h: &HermitianOperator<T>) -> Self {
        let dim = h.dim();
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let v = h.mat()[(i, j)];
                if v.norm_sqr() != T::zero() {
                    entries.push((i as u32, j as u32, v));
                }
            }
        }
        Self { dim, entries }
    }

    /// Builds from raw entries; callers must supply a Hermitian entry list.
    /// Entries are kept sorted by position so lookups can bisect.
    pub(crate) fn from_entries(dim: usize, mut entries: Vec<(u32, u32, Complex<T>)>) -> Self {
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, u32, Complex<T>)] {
        &self.entries
    }

    pub fn scale(mut self, s: T) -> Self {
        for e in &mut self.entries {
            e.2 = Complex::new(e.2.re * s, e.2.im * s);
        }
        self
    }

    /// Merges another operator into this one, summing duplicate positions.
    pub fn add_assign(&mut self, other: &SparseHerm<T>, weight: T) {
        debug_assert_eq!(self.dim, other.dim);
        self.entries
            .extend(other.entries.iter().map(|&(i, j, v)| (i, j, Complex::new(v.re * weight, v.im * weight))));
        self.compress();
    }

    fn compress(&mut self) {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut out: Vec<(u32, u32, Complex<T>)> = Vec::with_capacity(self.entries.len());
        for &(i, j, v) in &self.entries {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => out.push((i, j, v)),
            }
        }
        out.retain(|e| e.2.norm_sqr() != T::zero());
        self.entries = out;
    }

    /// `Tr[G X]`, real for Hermitian arguments; the imaginary part is dropped.
    pub fn inner(&self, x: &CMatrix<T>) -> T {
        debug_assert_eq!(x.n_rows(), self.dim);
        let mut acc = T::zero();
        for &(i, j, v) in &self.entries {
            let xji = x[(j as usize, i as usize)];
            acc += v.re * xji.re - v.im * xji.im;
        }
        acc
    }

    /// Adds `weight * G` into a dense accumulator.
    pub fn accumulate(&self, acc: &mut CMatrix<T>, weight: T) {
        debug_assert_eq!(acc.n_rows(), self.dim);
        for &(i, j, v) in &self.entries {
            acc[(i as usize, j as usize)] += Complex::new(v.re * weight, v.im * weight);
        }
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        self.accumulate(&mut m, T::one());
        m
    }

    /// Frobenius norm of the entry list.
    pub fn frobenius_norm(&self) -> T {
        let mut acc = T::zero();
        for &(_, _, v) in &self.entries {
            acc += v.norm_sqr();
        }
        num_traits::Float::sqrt(acc)
    }

    /// `Tr[G H]` for two sparse operators, via a sorted merge.
    pub fn inner_sparse(&self, other: &SparseHerm<T>) -> T {
        debug_assert_eq!(self.dim, other.dim);
        let (small, large) = if self.nnz() <= other.nnz() { (self, other) } else { (other, self) };
        let mut acc = T::zero();
        for &(i, j, v) in &small.entries {
            if let Ok(k) = large.entries.binary_search_by_key(&(j, i), |&(a, b, _)| (a, b)) {
                let w = large.entries[k].2;
                acc += v.re * w.re - v.im * w.im;
            }
        }
        acc
    }

    /// Largest entry magnitude, 0 for an empty list.
    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for &(_, _, v) in &self.entries {
            m = num_traits::Float::max(m, num_traits::Float::max(num_traits::Float::abs(v.re), num_traits::Float::abs(v.im)));
        }
        m
    }
}
