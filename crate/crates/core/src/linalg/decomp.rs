//! Spectral decompositions of Hermitian operators, backed by nalgebra.

use nalgebra::DMatrix;
use num_traits::Float;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CMatrix, HermitianOperator, LinalgError};
use crate::scalar::FactorScalar;

/// Relative eigenvalue threshold separating the support from the kernel.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Relative negative-eigenvalue slack accepted when treating an operator as PSD.
pub const PSD_TOL: f64 = 1e-9;

/// Eigendecomposition of a Hermitian operator: ascending eigenvalues, the
/// k-th column of `vectors` is the eigenvector of `values[k]`.
#[derive(Clone, Debug)]
pub struct Spectrum<T: FactorScalar> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: FactorScalar> Spectrum<T> {
    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    /// Reassemble `sum_k f(lambda_k) |v_k><v_k|`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> HermitianOperator<T> {
        let n = self.vectors.n_rows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lk) in self.values.iter().enumerate() {
            let w = f(lk);
            if w == T::zero() {
                continue;
            }
            let col: Vec<Complex<T>> = (0..n).map(|i| self.vectors[(i, k)]).collect();
            out.axpy(Complex::new(w, T::zero()), &CMatrix::outer(&col, &col));
        }
        HermitianOperator::new_unchecked(out.symmetrized())
    }
}

fn to_dmatrix<T: FactorScalar>(m: &CMatrix<T>) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(m.n_rows(), m.n_cols(), |i, j| m[(i, j)])
}

/// Fixed pseudorandom unitary, used to break structure that stalls the
/// backing iteration. Deterministic in `(n, seed)`.
fn generic_unitary<T: FactorScalar>(n: usize, seed: u64) -> DMatrix<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED ^ seed.wrapping_mul(0x9E37_79B9));
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex::new(T::c(rng.gen::<f64>() - 0.5), T::c(rng.gen::<f64>() - 0.5))
    });
    g.qr().q()
}

/// Decomposition in a rotated basis: conjugate by a generic unitary,
/// decompose there, rotate the eigenvectors back. The spectrum is basis
/// independent, but the rotation reliably unsticks structured inputs.
/// `None` if the rotated iteration still failed.
pub(crate) fn eigh_rotated<T: FactorScalar>(h: &HermitianOperator<T>, seed: u64) -> Option<Spectrum<T>> {
    let n = h.dim();
    let q = generic_unitary::<T>(n, seed);
    let rotated = q.adjoint() * to_dmatrix(h.mat()) * &q;
    let sym = (&rotated + rotated.adjoint()) * Complex::new(T::c(0.5), T::zero());
    let se = nalgebra::SymmetricEigen::new(sym);
    if !se.eigenvalues.iter().all(|l| Float::is_finite(*l)) {
        return None;
    }
    let back = &q * &se.eigenvectors;
    Some(sorted_spectrum(n, &se.eigenvalues.as_slice().to_vec(), |i, k| back[(i, k)]))
}

fn sorted_spectrum<T: FactorScalar>(
    n: usize,
    values: &[T],
    vector_entry: impl Fn(usize, usize) -> Complex<T>,
) -> Spectrum<T> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite eigenvalues"));
    let sorted: Vec<T> = order.iter().map(|&k| values[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| vector_entry(i, order[k]));
    Spectrum { values: sorted, vectors }
}

/// Hermitian eigendecomposition.
///
/// The backing QL iteration can return NaN on some sparse, highly
/// degenerate inputs; those are retried in a generically rotated basis.
pub fn eigh<T: FactorScalar>(h: &HermitianOperator<T>) -> Spectrum<T> {
    let n = h.dim();
    if n == 0 {
        return Spectrum { values: vec![], vectors: CMatrix::zeros(0, 0) };
    }
    let se = nalgebra::SymmetricEigen::new(to_dmatrix(h.mat()));
    if se.eigenvalues.iter().all(|l| Float::is_finite(*l)) {
        return sorted_spectrum(n, &se.eigenvalues.as_slice().to_vec(), |i, k| se.eigenvectors[(i, k)]);
    }
    (1..=4)
        .find_map(|seed| eigh_rotated(h, seed))
        .expect("eigendecomposition failed to converge in every basis tried")
}

/// Smallest eigenvalue.
pub fn psd_margin<T: FactorScalar>(h: &HermitianOperator<T>) -> T {
    eigh(h).min()
}

/// PSD acceptance rule: eigenvalues down to `-PSD_TOL * max(1, lambda_max)` pass.
pub fn is_psd<T: FactorScalar>(h: &HermitianOperator<T>) -> bool {
    let s = eigh(h);
    s.min() >= -T::c(PSD_TOL) * Float::max(T::one(), s.max())
}

/// Operator square root of a PSD operator; eigenvalues within the PSD slack
/// below zero are clipped to zero.
pub fn sqrt_psd<T: FactorScalar>(h: &HermitianOperator<T>) -> Result<HermitianOperator<T>, LinalgError> {
    let s = eigh(h);
    let floor = -T::c(PSD_TOL) * Float::max(T::one(), s.max());
    if s.min() < floor {
        return Err(LinalgError::NotPsd { min_eigenvalue: s.min().to_f64().unwrap_or(f64::NAN) });
    }
    Ok(s.apply(|l| if l > T::zero() { Float::sqrt(l) } else { T::zero() }))
}

/// Support data of a PSD operator `B`: the inverse square root on the support
/// and the support projector.
///
/// Eigenvalues at or below `SUPPORT_TOL * lambda_max` belong to the kernel.
/// Fails if `B` has a negative eigenvalue beyond the PSD slack.
pub fn support_pinv_sqrt<T: FactorScalar>(
    h: &HermitianOperator<T>,
) -> Result<(HermitianOperator<T>, HermitianOperator<T>), LinalgError> {
    let s = eigh(h);
    let lmax = s.max();
    let floor = -T::c(PSD_TOL) * Float::max(T::one(), lmax);
    if s.min() < floor {
        return Err(LinalgError::NotPsd { min_eigenvalue: s.min().to_f64().unwrap_or(f64::NAN) });
    }
    let cut = T::c(SUPPORT_TOL) * Float::max(lmax, T::zero());
    let pinv_sqrt = s.apply(|l| if l > cut { T::one() / Float::sqrt(l) } else { T::zero() });
    let proj = s.apply(|l| if l > cut { T::one() } else { T::zero() });
    Ok((pinv_sqrt, proj))
}
