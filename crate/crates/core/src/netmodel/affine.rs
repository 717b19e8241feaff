//! Affine hulls of dual network classes.
//!
//! The normalized dual of a network class `S` is the set of operators
//! pairing to exactly 1 with every member of `S`. Its affine hull is
//! recovered from the row space of `S`'s equality rows: members lie in that
//! row space and meet the hyperplane `<X0, .> = 1` through any feasible
//! point `X0`.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::constraints::{nosig_constraints, ConstraintRow, ConstraintSet};
use super::layout::SystemLayout;
use super::NetError;
use crate::linalg::{CMatrix, HermitianOperator, SparseHerm};
use crate::scalar::FactorScalar;

/// Largest total dimension accepted by the vectorized rank analysis.
pub const AFFINE_DIM_GUARD: usize = 32;

/// Relative eigenvalue cutoff separating row-space from null-space
/// directions of the row Gram matrix.
const RANK_TOL: f64 = 1e-10;

/// Orthonormal affine parametrization of a dual network class:
/// `Gamma = anchor + sum_k eta_k basis_k` ranges over the affine hull.
#[derive(Clone, Debug)]
pub struct DualAffineBasis<T: FactorScalar> {
    pub layout: SystemLayout,
    pub anchor: HermitianOperator<T>,
    pub basis: Vec<HermitianOperator<T>>,
}

impl<T: FactorScalar> DualAffineBasis<T> {
    /// Frobenius distance from `op` to the affine hull.
    pub fn membership_residual(&self, op: &HermitianOperator<T>) -> T {
        let mut delta = op.sub(&self.anchor);
        let residual = delta.clone();
        for b in &self.basis {
            let w = b.inner(&residual);
            delta = delta.sub(&b.scale(w));
        }
        delta.frobenius_norm()
    }
}

/// Real coordinate index table for `Herm(dim) -> R^(dim^2)`: diagonal first,
/// then interleaved real/imaginary parts of the upper triangle scaled by
/// sqrt(2), making the map an isometry for the trace inner product.
fn pair_coord(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    let before = i * dim - i * (i + 1) / 2 + (j - i - 1);
    dim + 2 * before
}

pub(crate) fn vec_sparse<T: FactorScalar>(sp: &SparseHerm<T>) -> Vec<(usize, T)> {
    let dim = sp.dim();
    let sqrt2 = T::c(std::f64::consts::SQRT_2);
    let mut coords = Vec::with_capacity(sp.nnz());
    for &(i, j, v) in sp.entries() {
        let (i, j) = (i as usize, j as usize);
        if i == j {
            coords.push((i, v.re));
        } else if i < j {
            let base = pair_coord(dim, i, j);
            if v.re != T::zero() {
                coords.push((base, sqrt2 * v.re));
            }
            if v.im != T::zero() {
                coords.push((base + 1, sqrt2 * v.im));
            }
        }
    }
    coords
}

pub(crate) fn vec_herm<T: FactorScalar>(h: &HermitianOperator<T>) -> Vec<T> {
    let dim = h.dim();
    let sqrt2 = T::c(std::f64::consts::SQRT_2);
    let mut v = vec![T::zero(); dim * dim];
    for i in 0..dim {
        v[i] = h.mat()[(i, i)].re;
        for j in i + 1..dim {
            let e = h.mat()[(i, j)];
            let base = pair_coord(dim, i, j);
            v[base] = sqrt2 * e.re;
            v[base + 1] = sqrt2 * e.im;
        }
    }
    v
}

pub(crate) fn unvec_herm<T: FactorScalar>(v: &[T], dim: usize) -> HermitianOperator<T> {
    let inv_sqrt2 = T::c(std::f64::consts::FRAC_1_SQRT_2);
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex::new(v[i], T::zero());
        for j in i + 1..dim {
            let base = pair_coord(dim, i, j);
            let e = Complex::new(v[base] * inv_sqrt2, v[base + 1] * inv_sqrt2);
            m[(i, j)] = e;
            m[(j, i)] = e.conj();
        }
    }
    HermitianOperator::new_unchecked(m)
}

/// Row-space / null-space split of a single-block row family, from the
/// eigendecomposition of the accumulated Gram matrix of normalized rows.
struct RowSpaces<T: FactorScalar> {
    row_basis: Vec<Vec<T>>,
    null_basis: Vec<Vec<T>>,
}

fn row_spaces<T: FactorScalar>(rows: &[ConstraintRow<T>], dim: usize) -> Result<RowSpaces<T>, NetError> {
    if dim > AFFINE_DIM_GUARD {
        return Err(NetError::TooLarge { dim, guard: AFFINE_DIM_GUARD });
    }
    let n = dim * dim;
    let mut gram = DMatrix::<T>::zeros(n, n);
    for row in rows {
        if row.coeffs.len() != 1 || row.coeffs[0].0 != 0 {
            return Err(NetError::Internal("row-space analysis needs single-block rows".into()));
        }
        let coords = vec_sparse(&row.coeffs[0].1);
        let norm_sq = coords.iter().fold(T::zero(), |a, &(_, v)| a + v * v);
        if norm_sq == T::zero() {
            continue;
        }
        let inv = T::one() / norm_sq;
        for &(t1, v1) in &coords {
            for &(t2, v2) in &coords {
                gram[(t1, t2)] += v1 * v2 * inv;
            }
        }
    }
    let eig = nalgebra::SymmetricEigen::new(gram);
    let lam_max = eig.eigenvalues.iter().fold(T::zero(), |m, &l| num_traits::Float::max(m, l));
    let cut = lam_max * T::c(RANK_TOL);
    let mut row_basis = Vec::new();
    let mut null_basis = Vec::new();
    for k in 0..n {
        let col: Vec<T> = (0..n).map(|t| eig.eigenvectors[(t, k)]).collect();
        if eig.eigenvalues[k] > cut {
            row_basis.push(col);
        } else {
            null_basis.push(col);
        }
    }
    Ok(RowSpaces { row_basis, null_basis })
}

fn dot<T: FactorScalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Computes an orthonormal affine parametrization of the dual of the class
/// cut out by `cs`. Limited to total dimension [`AFFINE_DIM_GUARD`].
pub fn dual_affine_basis<T: FactorScalar>(cs: &ConstraintSet<T>) -> Result<DualAffineBasis<T>, NetError> {
    if cs.n_blocks() != 1 {
        return Err(NetError::BlockCount { expected: 1, found: cs.n_blocks() });
    }
    let dim = cs.layout().dim();
    let spaces = row_spaces(cs.rows(), dim)?;
    let x0 = vec_herm(&cs.positive_point()[0]);

    // Project the feasible point onto the row space and rescale it onto the
    // pairing hyperplane; that projection also fixes the direction to drop.
    let weights: Vec<T> = spaces.row_basis.iter().map(|w| dot(w, &x0)).collect();
    let denom = weights.iter().fold(T::zero(), |a, &w| a + w * w);
    if denom <= T::zero() {
        return Err(NetError::Internal("feasible point orthogonal to row space".into()));
    }
    let n = dim * dim;
    let mut p = vec![T::zero(); n];
    for (w, &wt) in spaces.row_basis.iter().zip(&weights) {
        for t in 0..n {
            p[t] += w[t] * wt;
        }
    }
    let anchor_vec: Vec<T> = p.iter().map(|&v| v / denom).collect();
    let p_norm = num_traits::Float::sqrt(denom);
    let p_hat: Vec<T> = p.iter().map(|&v| v / p_norm).collect();

    // Orthonormal basis of (row space) intersected with the hyperplane's
    // direction space, via column-pivoted QR of the projected row basis.
    let r = spaces.row_basis.len();
    let mut m = DMatrix::<T>::zeros(n, r);
    for (k, w) in spaces.row_basis.iter().enumerate() {
        let along = dot(w, &p_hat);
        for t in 0..n {
            m[(t, k)] = w[t] - along * p_hat[t];
        }
    }
    let qr = m.col_piv_qr();
    let q = qr.q();
    let rdiag: Vec<T> = (0..r.min(n)).map(|k| num_traits::Float::abs(qr.r()[(k, k)])).collect();
    let rmax = rdiag.iter().fold(T::zero(), |a, &b| num_traits::Float::max(a, b));
    let cut = rmax * T::c(1e-10);
    let mut basis = Vec::new();
    for (k, &d) in rdiag.iter().enumerate() {
        if d > cut {
            let col: Vec<T> = (0..n).map(|t| q[(t, k)]).collect();
            basis.push(unvec_herm(&col, dim));
        }
    }

    Ok(DualAffineBasis {
        layout: cs.layout().clone(),
        anchor: unvec_herm(&anchor_vec, dim),
        basis,
    })
}

/// Constraint set for the normalized dual of the no-signalling class: rows
/// are a null-space basis of the no-signalling rows plus the pairing row
/// through the no-signalling seed point.
pub fn dual_nosig_constraints<T: FactorScalar>(layout: SystemLayout) -> Result<ConstraintSet<T>, NetError> {
    let primal = nosig_constraints::<T>(layout.clone())?;
    let dim = layout.dim();
    let spaces = row_spaces(primal.rows(), dim)?;
    let mut rows: Vec<ConstraintRow<T>> = spaces
        .null_basis
        .iter()
        .map(|v| ConstraintRow {
            coeffs: vec![(0, SparseHerm::from_dense(&unvec_herm(v, dim)))],
            rhs: T::zero(),
        })
        .collect();
    rows.push(ConstraintRow {
        coeffs: vec![(0, SparseHerm::from_dense(&primal.positive_point()[0]))],
        rhs: T::one(),
    });
    let normalization_index = rows.len() - 1;
    super::constraints::dual_nosig_from_parts(layout, rows, normalization_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::netmodel::constraints::{comb_constraints, dual_comb_constraints};
    use crate::netmodel::LabeledOperator;
    use num_complex::Complex;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = CMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn vectorization_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = M::from_fn(5, 5, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let a = HermitianOperator::new(m.add(&m.dagger()).scale_re(0.5)).unwrap();
            let m2 = M::from_fn(5, 5, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let b = HermitianOperator::new(m2.add(&m2.dagger()).scale_re(0.5)).unwrap();
            let va = vec_herm(&a);
            let vb = vec_herm(&b);
            assert!((dot(&va, &vb) - a.inner(&b)).abs() < 1e-12);
            let back = unvec_herm(&va, 5);
            assert!(back.sub(&a).frobenius_norm() < 1e-12);
        }
        let sp = SparseHerm::from_dense(&HermitianOperator::identity(4).scale(0.3));
        let coords = vec_sparse(&sp);
        assert_eq!(coords.len(), 4);
    }

    #[test]
    fn channel_dual_hull_is_states_tensor_identity() {
        let layout = SystemLayout::chain(2, &["in", "out"]).unwrap();
        let cs = comb_constraints::<f64>(layout).unwrap();
        let hull = dual_affine_basis(&cs).unwrap();
        assert_eq!(hull.basis.len(), 3);

        let mut rho = M::zeros(2, 2);
        rho[(0, 0)] = c(0.2, 0.0);
        rho[(1, 1)] = c(0.8, 0.0);
        rho[(0, 1)] = c(0.1, -0.3);
        rho[(1, 0)] = c(0.1, 0.3);
        let member = HermitianOperator::new(kron(&rho, &M::identity(2))).unwrap();
        assert!(hull.membership_residual(&member) < 1e-10);

        let mut sigma = M::identity(2);
        sigma[(0, 0)] = c(2.0, 0.0);
        let outside = HermitianOperator::new(kron(&rho, &sigma)).unwrap();
        assert!(hull.membership_residual(&outside) > 0.1);

        // The anchor itself is the maximally mixed input tester.
        let expected = HermitianOperator::new(kron(&M::identity(2).scale_re(0.5), &M::identity(2))).unwrap();
        assert!(hull.anchor.sub(&expected).frobenius_norm() < 1e-10);
    }

    #[test]
    fn dual_hull_members_pair_to_one_with_class_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let layout = SystemLayout::chain(2, &["in", "out"]).unwrap();
        let cs = dual_comb_constraints::<f64>(layout.clone()).unwrap();
        // Dual of the dual-comb class: hull members pair to 1 with every
        // single-outcome tester; channels are such pairing partners.
        let hull = dual_affine_basis(&cs).unwrap();
        for _ in 0..10 {
            let mut gamma = hull.anchor.clone();
            for b in &hull.basis {
                gamma = gamma.add(&b.scale(rng.gen_range(-0.05..0.05)));
            }
            // Pair with testers rho (x) I.
            let mut rho = M::zeros(2, 2);
            let x = rng.gen_range(0.05..0.95);
            rho[(0, 0)] = c(x, 0.0);
            rho[(1, 1)] = c(1.0 - x, 0.0);
            let tester = HermitianOperator::new(kron(&rho, &M::identity(2))).unwrap();
            let pairing = gamma.inner(&tester);
            assert!((pairing - 1.0).abs() < 1e-9, "pairing {pairing}");
        }
    }

    #[test]
    fn dual_nosig_anchor_consistency() {
        let layout = SystemLayout::chain(2, &["0", "1", "2", "3"]).unwrap();
        let nosig = nosig_constraints::<f64>(layout.clone()).unwrap();
        let dual = dual_nosig_constraints::<f64>(layout).unwrap();

        // The affine-hull anchor of the no-signalling class satisfies the
        // dual rows built independently from the null space.
        let hull = dual_affine_basis(&nosig).unwrap();
        let member = LabeledOperator::new(dual.layout().clone(), hull.anchor.clone()).unwrap();
        assert!(dual.equality_residual(std::slice::from_ref(&member)).unwrap() < 1e-9);

        // And dual members pair to 1 with the no-signalling seed point.
        let seed = nosig.positive_point()[0].clone();
        assert!((dual.positive_point()[0].inner(&seed) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_guard() {
        let layout = SystemLayout::chain(3, &["0", "1", "2", "3"]).unwrap();
        let cs = comb_constraints::<f64>(layout).unwrap();
        match dual_affine_basis(&cs) {
            Err(NetError::TooLarge { dim, .. }) => assert_eq!(dim, 81),
            other => panic!("expected dimension guard, got {other:?}"),
        }
    }
}
