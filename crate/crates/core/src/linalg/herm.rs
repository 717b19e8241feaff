//! Hermitian operators with validated construction.

use num_complex::Complex;

use super::{CMatrix, LinalgError};
use crate::scalar::Scalar;

/// Relative asymmetry accepted before a matrix is rejected as non-Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A square complex matrix certified Hermitian at construction.
///
/// Construction symmetrizes `(M + M^dag)/2` when the asymmetry is within
/// [`HERMITICITY_TOL`] relative to `max(1, max|entry|)` and rejects otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T: Scalar> {
    m: CMatrix<T>,
}

impl<T: Scalar> HermitianOperator<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare { n_rows: m.n_rows(), n_cols: m.n_cols() });
        }
        let asym = m.asymmetry();
        let scale = T::one().max(m.max_abs());
        if asym > T::c(HERMITICITY_TOL) * scale {
            return Err(LinalgError::NotHermitian { asymmetry: asym.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(Self { m: m.symmetrized() })
    }

    /// Wraps a matrix that is Hermitian by construction (checked in debug builds).
    pub(crate) fn new_unchecked(m: CMatrix<T>) -> Self {
        debug_assert!(m.is_square());
        debug_assert!(m.asymmetry() <= T::c(1e-10) * T::one().max(m.max_abs()));
        Self { m }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: CMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMatrix::identity(n) }
    }

    pub fn scaled_identity(n: usize, s: T) -> Self {
        Self { m: CMatrix::scaled_identity(n, s) }
    }

    /// Projector `|v><v| / <v|v>` onto a (not necessarily normalized) vector.
    pub fn projector(v: &[Complex<T>]) -> Self {
        let nrm: T = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
        assert!(nrm > T::zero(), "projector of zero vector");
        Self { m: CMatrix::outer(v, v).scale_re(T::one() / nrm) }
    }

    /// Unnormalized rank-one operator `|v><v|`.
    pub fn dyad(v: &[Complex<T>]) -> Self {
        Self { m: CMatrix::outer(v, v) }
    }

    pub fn dim(&self) -> usize {
        self.m.n_rows()
    }

    pub fn mat(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_mat(self) -> CMatrix<T> {
        self.m
    }

    pub fn trace_re(&self) -> T {
        self.m.trace().re
    }

    /// Frobenius inner product `Tr[A B]`, real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> T {
        // Tr[A B] = <A^dag, B> = <A, B> for Hermitian A.
        self.m.inner_re(&other.m)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: self.m.add(&other.m) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { m: self.m.sub(&other.m) }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { m: self.m.scale_re(s) }
    }

    pub fn frobenius_norm(&self) -> T {
        self.m.frobenius_norm()
    }

    pub fn max_abs(&self) -> T {
        self.m.max_abs()
    }

    /// Transpose (equals entrywise conjugate for Hermitian operators).
    pub fn transpose(&self) -> Self {
        Self { m: self.m.transpose() }
    }
}
