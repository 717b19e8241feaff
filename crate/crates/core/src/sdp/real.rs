//! Real symmetric form of a presolved problem.
//!
//! Problems with exactly real data pass through unchanged. Otherwise every
//! Hermitian block H = A + iB maps to the symmetric block [[A, -B], [B, A]],
//! which doubles inner products, preserves eigenvalues (each doubled in
//! multiplicity), and keeps the PSD cone intact. Right-hand sides are doubled
//! to compensate; objective values are halved on the way back.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::linalg::{CMatrix, SparseHerm};
use crate::scalar::FactorScalar;

use super::presolve::InternalRow;

/// Sparse real symmetric row coefficients, grouped by PSD block.
#[derive(Clone, Debug)]
pub(super) struct RealRow<T> {
    pub blocks: Vec<(usize, Vec<(u32, u32, T)>)>,
}

pub(super) struct RealForm<T: FactorScalar> {
    pub dims: Vec<usize>,
    pub rows: Vec<RealRow<T>>,
    pub b: Vec<T>,
    pub c: Vec<DMatrix<T>>,
    pub embedded: bool,
}

fn has_imag<T: FactorScalar>(h: &SparseHerm<T>) -> bool {
    h.entries().iter().any(|e| e.2.im != T::zero())
}

fn real_entries<T: FactorScalar>(h: &SparseHerm<T>, embed: bool) -> Vec<(u32, u32, T)> {
    let n = h.dim() as u32;
    let mut out = Vec::with_capacity(h.nnz() * if embed { 4 } else { 1 });
    for &(i, j, v) in h.entries() {
        if !embed {
            if v.re != T::zero() {
                out.push((i, j, v.re));
            }
            continue;
        }
        if v.re != T::zero() {
            out.push((i, j, v.re));
            out.push((i + n, j + n, v.re));
        }
        if v.im != T::zero() {
            out.push((i, j + n, -v.im));
            out.push((i + n, j, v.im));
        }
    }
    out.sort_unstable_by_key(|&(i, j, _)| (i, j));
    out
}

fn scatter_dense<T: FactorScalar>(dim: usize, entries: &[(u32, u32, T)]) -> DMatrix<T> {
    let mut m = DMatrix::<T>::zeros(dim, dim);
    for &(i, j, v) in entries {
        m[(i as usize, j as usize)] += v;
    }
    m
}

pub(super) fn build<T: FactorScalar>(
    psd_dims: &[usize],
    kept: &[InternalRow<T>],
    c_psd: &[SparseHerm<T>],
) -> RealForm<T> {
    let embedded = c_psd.iter().any(has_imag)
        || kept.iter().any(|r| r.psd.iter().any(|(_, h)| has_imag(h)));
    let factor = if embedded { 2 } else { 1 };
    let dims: Vec<usize> = psd_dims.iter().map(|d| d * factor).collect();
    let rows = kept
        .iter()
        .map(|r| RealRow {
            blocks: r
                .psd
                .iter()
                .map(|(b, h)| (*b, real_entries(h, embedded)))
                .collect(),
        })
        .collect();
    let two = T::one() + T::one();
    let b = kept
        .iter()
        .map(|r| if embedded { r.rhs * two } else { r.rhs })
        .collect();
    let c = c_psd
        .iter()
        .enumerate()
        .map(|(k, h)| scatter_dense(dims[k], &real_entries(h, embedded)))
        .collect();
    RealForm { dims, rows, b, c, embedded }
}

/// Maps a real block back to a complex Hermitian matrix, averaging away the
/// solver's numerical asymmetry.
pub(super) fn unembed<T: FactorScalar>(m: &DMatrix<T>, dim: usize, embedded: bool) -> CMatrix<T> {
    let half = T::c(0.5);
    let out = CMatrix::from_fn(dim, dim, |i, j| {
        if embedded {
            let re = (m[(i, j)] + m[(i + dim, j + dim)]) * half;
            let im = (m[(i + dim, j)] - m[(i, j + dim)]) * half;
            Complex::new(re, im)
        } else {
            Complex::new(m[(i, j)], T::zero())
        }
    });
    out.symmetrized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianOperator;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_herm(rng: &mut ChaCha8Rng, dim: usize) -> HermitianOperator<f64> {
        let raw = CMatrix::from_fn(dim, dim, |_, _| Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        HermitianOperator::new(raw.symmetrized()).expect("symmetrized input is Hermitian")
    }

    #[test]
    fn embedding_doubles_spectra_and_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let h = random_herm(&mut rng, 4);
            let g = random_herm(&mut rng, 4);
            let hs = SparseHerm::from_dense(&h);
            let gs = SparseHerm::from_dense(&g);
            let he = scatter_dense(8, &real_entries(&hs, true));
            let ge = scatter_dense(8, &real_entries(&gs, true));
            let inner_real = (&he * &ge).trace();
            assert!((inner_real - 2.0 * hs.inner_sparse(&gs)).abs() < 1e-12);

            let spec = crate::linalg::eigh(&h);
            let mut doubled: Vec<f64> = spec.values.iter().flat_map(|&v| [v, v]).collect();
            doubled.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
            let se = nalgebra::SymmetricEigen::new(he.clone());
            let mut got: Vec<f64> = se.eigenvalues.iter().copied().collect();
            got.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
            for (a, b) in doubled.iter().zip(got.iter()) {
                assert!((a - b).abs() < 1e-9, "eigenvalue mismatch {a} vs {b}");
            }

            let back = unembed(&he, 4, true);
            assert!(back.sub(h.mat()).max_abs() < 1e-12);
        }
    }
}
