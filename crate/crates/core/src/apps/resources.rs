//! Two-copy rotation-invariant projectors and maximally entangled
//! resources the operator builders are assembled from.

use num_complex::Complex;

use crate::linalg::{CMatrix, HermitianOperator};
use crate::netmodel::{LabeledOperator, NetError, Role, SystemInfo, SystemLayout};
use crate::scalar::Scalar;

use super::AppError;

/// Projectors on the symmetric and antisymmetric subspaces of two copies
/// of a `d`-dimensional system, with their ranks.
#[derive(Clone, Debug)]
pub struct ProjectorPair<T: Scalar> {
    /// `(I + SWAP) / 2` on `d (x) d`.
    pub p_plus: HermitianOperator<T>,
    /// `(I - SWAP) / 2` on `d (x) d`.
    pub p_minus: HermitianOperator<T>,
    /// Symmetric rank `d(d+1)/2`.
    pub d_plus: usize,
    /// Antisymmetric rank `d(d-1)/2`.
    pub d_minus: usize,
}

/// Splits two copies of a `d`-dimensional space into its symmetric and
/// antisymmetric subspaces; both projectors commute with `U (x) U` for
/// every unitary `U`, which is what pins the twirled operators to them.
pub fn sym_antisym<T: Scalar>(d: usize) -> Result<ProjectorPair<T>, AppError> {
    if d < 2 {
        return Err(AppError::BadInput(format!("two-copy projectors need d >= 2, got {d}")));
    }
    let n = d * d;
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let swap =
        CMatrix::from_fn(n, n, |r, c| if r / d == c % d && r % d == c / d { one } else { zero });
    let id = CMatrix::identity(n);
    let half = T::c(0.5);
    Ok(ProjectorPair {
        p_plus: HermitianOperator::new_unchecked(id.add(&swap).scale_re(half)),
        p_minus: HermitianOperator::new_unchecked(id.sub(&swap).scale_re(half)),
        d_plus: d * (d + 1) / 2,
        d_minus: d * (d - 1) / 2,
    })
}

/// Unnormalized maximally entangled vector `|I>> = sum_i |ii>` with the
/// rank-1 projector onto it and the complementary projector.
#[derive(Clone, Debug)]
pub struct EntangledResources<T: Scalar> {
    /// `|I>>`, squared norm `d`.
    pub max_ent_vector: Vec<Complex<T>>,
    /// `E = |I>><<I| / d`.
    pub e_projector: HermitianOperator<T>,
    /// `I - E`.
    pub e_perp: HermitianOperator<T>,
    /// Rank `d^2 - 1` of `e_perp`.
    pub d_perp: usize,
}

/// Builds the maximally entangled resources on `d (x) d`.
pub fn entangled_resources<T: Scalar>(d: usize) -> Result<EntangledResources<T>, AppError> {
    if d < 2 {
        return Err(AppError::BadInput(format!("entangled resources need d >= 2, got {d}")));
    }
    let mut v = vec![Complex::new(T::zero(), T::zero()); d * d];
    for i in 0..d {
        v[i * d + i] = Complex::new(T::one(), T::zero());
    }
    let e = HermitianOperator::dyad(&v).scale(T::one() / real::<T>(d));
    let e_perp = HermitianOperator::identity(d * d).sub(&e);
    Ok(EntangledResources { max_ent_vector: v, e_projector: e, e_perp, d_perp: d * d - 1 })
}

/// Count as a scalar.
pub(crate) fn real<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count fits scalar")
}

/// Layout carrier for intermediate factor products: labels and dimensions
/// only, placeholder roles and steps.
pub(crate) fn loose_layout(systems: &[(&str, usize)]) -> SystemLayout {
    SystemLayout::new(systems.iter().map(|&(l, d)| SystemInfo::new(l, d, Role::Out, 1)).collect())
        .expect("distinct labels with nonzero dimensions")
}

/// Reorders `op` into `target`'s system order and adopts its roles and
/// steps; labels and dimensions must already agree.
pub(crate) fn reframed<T: Scalar>(
    op: &LabeledOperator<T>,
    target: &SystemLayout,
) -> Result<LabeledOperator<T>, NetError> {
    let aligned = op.aligned_to(target)?;
    LabeledOperator::new(target.clone(), aligned.into_op())
}

/// Row-major vectorization `|X>>` on (row space, column space).
pub(crate) fn vec_row_col<T: Scalar>(x: &CMatrix<T>) -> Vec<Complex<T>> {
    let (m, n) = (x.n_rows(), x.n_cols());
    let mut v = vec![Complex::new(T::zero(), T::zero()); m * n];
    for a in 0..m {
        for b in 0..n {
            v[a * n + b] = x[(a, b)];
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::haar_sample;
    use crate::linalg::kron;

    type H = HermitianOperator<f64>;

    fn frob_comm(a: &CMatrix<f64>, g: &CMatrix<f64>) -> f64 {
        a.matmul(g).sub(&g.matmul(a)).frobenius_norm()
    }

    #[test]
    fn two_copy_projectors_split_the_space() {
        for d in [2usize, 3] {
            let pair = sym_antisym::<f64>(d).unwrap();
            let n = d * d;
            let sum = pair.p_plus.add(&pair.p_minus);
            assert!(sum.sub(&H::identity(n)).max_abs() < 1e-14);
            assert!(pair.p_plus.mat().matmul(pair.p_minus.mat()).max_abs() < 1e-14);
            assert!((pair.p_plus.trace_re() - pair.d_plus as f64).abs() < 1e-12);
            assert!((pair.p_minus.trace_re() - pair.d_minus as f64).abs() < 1e-12);
            assert_eq!(pair.d_plus + pair.d_minus, n);
        }

        // At d=2 the antisymmetric projector is the singlet projector.
        let pair = sym_antisym::<f64>(2).unwrap();
        assert_eq!((pair.d_plus, pair.d_minus), (3, 1));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = [
            Complex::new(0.0, 0.0),
            Complex::new(s, 0.0),
            Complex::new(-s, 0.0),
            Complex::new(0.0, 0.0),
        ];
        assert!(pair.p_minus.sub(&H::dyad(&singlet)).max_abs() < 1e-14);

        assert!(sym_antisym::<f64>(1).is_err());
    }

    #[test]
    fn projectors_commute_with_paired_rotations() {
        for (d, trials) in [(2usize, 20u64), (3, 5)] {
            let pair = sym_antisym::<f64>(d).unwrap();
            for t in 0..trials {
                let u = haar_sample::<f64>(d, 900 + t).unwrap();
                let uu = kron(&u, &u);
                assert!(frob_comm(pair.p_plus.mat(), &uu) < 1e-10);
                assert!(frob_comm(pair.p_minus.mat(), &uu) < 1e-10);
            }
        }
    }

    #[test]
    fn entangled_projectors_partition_identity() {
        for d in [2usize, 3, 4] {
            let res = entangled_resources::<f64>(d).unwrap();
            let n = d * d;
            let norm2: f64 = res.max_ent_vector.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm2 - d as f64).abs() < 1e-12);
            assert!((res.e_projector.trace_re() - 1.0).abs() < 1e-12);
            // Rank-1 projector: idempotent.
            let e2 = res.e_projector.mat().matmul(res.e_projector.mat());
            assert!(e2.sub(res.e_projector.mat()).max_abs() < 1e-13);
            assert!(res.e_projector.add(&res.e_perp).sub(&H::identity(n)).max_abs() < 1e-14);
            assert_eq!(res.d_perp, n - 1);
            assert!((res.e_perp.trace_re() - res.d_perp as f64).abs() < 1e-12);
        }
        assert!(entangled_resources::<f64>(1).is_err());
    }
}
