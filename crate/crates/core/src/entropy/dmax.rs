//! Max relative entropy, pairwise and relative to a constraint set.

use num_traits::Float;

use super::{EntropyError, EntropyValue};
use crate::linalg::{eigh, is_psd, support_pinv_sqrt, HermitianOperator, PSD_TOL};
use crate::netmodel::{ConstraintSet, LabeledOperator};
use crate::scalar::FactorScalar;
use crate::sdp::{solve, Block, Coeff, SdpProblem, SdpStatus, SolveOptions};

/// Relative mass of `a` outside the support of `b` that still counts as
/// zero; anything beyond it makes the divergence infinite.
const SUPPORT_MASS_TOL: f64 = 1e-9;

/// Max relative entropy `log2 min { w : a <= w * b }` in bits.
///
/// Computed spectrally as `log2 lambda_max(b^{-1/2} a b^{-1/2})` on the
/// support of `b`. Mass of `a` outside that support beyond
/// [`SUPPORT_MASS_TOL`] gives `+inf`; a vanishing `a` gives `-inf`
/// (the convention `log 0 := -inf`).
pub fn d_max_pair<T: FactorScalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<EntropyValue<T>, EntropyError> {
    if a.dim() != b.dim() {
        return Err(EntropyError::BadInput(format!(
            "operators have dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    if !is_psd(a) {
        return Err(EntropyError::BadInput("first operator is not positive semidefinite".into()));
    }
    // Rejects a non-PSD second operator on its own.
    let (pinv_sqrt, proj) = support_pinv_sqrt(b)?;
    let leak = a.trace_re() - proj.inner(a);
    if leak > T::c(SUPPORT_MASS_TOL) * Float::max(T::one(), a.trace_re()) {
        return Ok(EntropyValue::infinite());
    }
    let m = pinv_sqrt.mat().matmul(a.mat()).matmul(pinv_sqrt.mat());
    let compressed = HermitianOperator::new_unchecked(m.symmetrized());
    let lambda = Float::max(eigh(&compressed).max(), T::zero());
    Ok(EntropyValue::from_lambda(lambda, None))
}

/// Max relative entropy from `a` to a whole constraint set: the smallest
/// `d_max_pair(a, g)` over members `g`, solved as a single program.
///
/// The bilinear search over `(lambda, g)` is linearized by homogenization:
/// writing `G := lambda * g`, every homogeneous set row stays valid for `G`
/// and the one inhomogeneous normalization row becomes `<N, G> = r * lambda`
/// with `lambda` a free variable; `G >= a` enters as the PSD slack
/// `S = G - a`. Minimizing `lambda` and de-homogenizing gives the witness
/// `g = (S + a) / lambda`.
pub fn d_max_to_set<T: FactorScalar>(
    a: &LabeledOperator<T>,
    cs: &ConstraintSet<T>,
) -> Result<EntropyValue<T>, EntropyError> {
    if cs.n_blocks() != 1 {
        return Err(EntropyError::BadInput(
            "relative entropy to a multi-outcome set is not defined".into(),
        ));
    }
    let al = a.aligned_to(cs.layout())?;
    if !is_psd(al.op()) {
        return Err(EntropyError::BadInput("operator is not positive semidefinite".into()));
    }
    if al.op().max_abs() <= T::c(PSD_TOL) {
        // log 0 := -inf; any member witnesses the zero operator.
        let w = LabeledOperator::new(cs.layout().clone(), cs.positive_point()[0].clone())?;
        return Ok(EntropyValue::from_lambda(T::zero(), Some(w)));
    }

    let n = cs.layout().dim();
    let mut p = SdpProblem::new(vec![Block::Psd { dim: n }, Block::Free], false);
    p.set_objective(vec![(1, Coeff::Scalar(T::one()))]);
    for row in cs.rows() {
        let (_, g) = &row.coeffs[0];
        let mut coeffs = vec![(0, Coeff::Herm(g.clone()))];
        if row.rhs != T::zero() {
            coeffs.push((1, Coeff::Scalar(-row.rhs)));
        }
        p.push_row(coeffs, -g.inner(al.mat()));
    }
    let sol = solve(&p, &SolveOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(EntropyError::Unattained(format!(
            "scale minimization stopped with status {:?} (gap {})",
            sol.status, sol.gap
        )));
    }
    let lambda = sol.value;
    if !(lambda > T::zero()) {
        return Err(EntropyError::Unattained(format!("nonpositive optimal scale {lambda}")));
    }
    let s = sol.primal[0].herm().expect("block 0 is PSD");
    let gamma = s.mat().add(al.mat()).scale_re(T::one() / lambda).symmetrized();
    let w = LabeledOperator::new(cs.layout().clone(), HermitianOperator::new_unchecked(gamma))?;
    Ok(EntropyValue::from_lambda(lambda, Some(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{psd_margin, CMatrix};
    use crate::netmodel::{
        comb_constraints, dual_comb_constraints, Role, SystemInfo, SystemLayout,
    };
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = CMatrix<f64>;
    type H = HermitianOperator<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_herm(rng: &mut ChaCha8Rng, n: usize) -> H {
        let m = M::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        HermitianOperator::new(m.add(&m.dagger()).scale_re(0.5)).unwrap()
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> H {
        let m = M::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        HermitianOperator::new(m.matmul(&m.dagger())).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> H {
        let p = random_psd(rng, n);
        p.scale(1.0 / p.trace_re())
    }

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> M {
        eigh(&random_herm(rng, n)).vectors
    }

    /// Choi of the unitary channel `u` on the 1-step layout (in, out).
    fn unitary_choi(u: &M) -> M {
        let d = u.n_rows();
        let mut v = vec![c(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                v[i * d + k] = u[(k, i)];
            }
        }
        HermitianOperator::dyad(&v).into_mat()
    }

    fn diag(entries: &[f64]) -> H {
        let n = entries.len();
        HermitianOperator::new(M::from_fn(n, n, |i, j| {
            if i == j {
                c(entries[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
        .unwrap()
    }

    #[test]
    fn pair_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=5 {
            let rho = random_state(&mut rng, n);
            let v = d_max_pair(&rho, &rho).unwrap();
            assert!(v.bits.abs() < 1e-9, "self-divergence {} at dim {n}", v.bits);
        }
        let d = 3;
        let v = d_max_pair(&H::scaled_identity(d, 1.0 / d as f64), &H::identity(d)).unwrap();
        assert!((v.bits + (d as f64).log2()).abs() < 1e-12);

        let v = d_max_pair(&diag(&[1.0, 0.0]), &H::scaled_identity(2, 0.5)).unwrap();
        assert!((v.bits - 1.0).abs() < 1e-12);
        assert!((v.lambda - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pair_support_and_zero_rules() {
        let v = d_max_pair(&diag(&[0.0, 1.0]), &diag(&[1.0, 0.0])).unwrap();
        assert!(v.bits.is_infinite() && v.bits > 0.0);

        let v = d_max_pair(&H::zeros(3), &H::identity(3)).unwrap();
        assert!(v.bits.is_infinite() && v.bits < 0.0);
        assert_eq!(v.lambda, 0.0);

        let v = d_max_pair(&diag(&[0.0, 2.0]), &diag(&[5.0, 1.0])).unwrap();
        assert!((v.bits - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pair_rejects_non_psd() {
        let sz = diag(&[1.0, -1.0]);
        assert!(d_max_pair(&sz, &H::identity(2)).is_err());
        assert!(d_max_pair(&H::identity(2), &sz).is_err());
    }

    #[test]
    fn pair_matches_feasibility_bracket() {
        // Independent check straight from the definition: lambda*b - a must
        // be PSD while shrinking lambda by a relative epsilon breaks it.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let n = rng.gen_range(2..5);
            let a = random_psd(&mut rng, n);
            let b = random_psd(&mut rng, n);
            let lambda = d_max_pair(&a, &b).unwrap().lambda;
            let scale = a.max_abs().max(1.0);
            assert!(psd_margin(&b.scale(lambda).sub(&a)) > -1e-8 * scale);
            assert!(psd_margin(&b.scale(lambda * (1.0 - 1e-6)).sub(&a)) < 0.0);
        }
    }

    #[test]
    fn to_set_member_gives_zero() {
        let layout = SystemLayout::chain(2, &["i1", "o1"]).unwrap();
        let cs = comb_constraints::<f64>(layout.clone()).unwrap();
        let member = LabeledOperator::new(layout, cs.positive_point()[0].clone()).unwrap();
        let v = d_max_to_set(&member, &cs).unwrap();
        assert!(v.bits.abs() < 1e-7, "member divergence {}", v.bits);
        let w = v.witness.unwrap();
        assert!(cs.check_point(&[w]).unwrap().satisfied(1e-7));
    }

    #[test]
    fn to_set_singleton_matches_pairwise() {
        // The dual combs of an output-only step form the singleton
        // { identity }, so the set optimum must equal the pairwise value.
        let layout =
            SystemLayout::new(vec![SystemInfo::new("x", 2, Role::Out, 1)]).unwrap();
        let cs = dual_comb_constraints::<f64>(layout.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let a = random_psd(&mut rng, 2);
            let via_set =
                d_max_to_set(&LabeledOperator::new(layout.clone(), a.clone()).unwrap(), &cs)
                    .unwrap();
            let via_pair = d_max_pair(&a, &H::identity(2)).unwrap();
            assert!((via_set.bits - via_pair.bits).abs() < 1e-7);
        }
    }

    #[test]
    fn to_set_over_states_is_log_trace() {
        // Over all density matrices the optimal scale is exactly tr(a),
        // attained at g = a / tr(a).
        let layout = SystemLayout::new(vec![
            SystemInfo::new("s", 2, Role::Out, 1),
            SystemInfo::new("t", 2, Role::Out, 1),
        ])
        .unwrap();
        let states = comb_constraints::<f64>(layout.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..5 {
            let a = random_psd(&mut rng, 4);
            let v = d_max_to_set(&LabeledOperator::new(layout.clone(), a.clone()).unwrap(), &states)
                .unwrap();
            assert!((v.lambda - a.trace_re()).abs() < 1e-6 * a.trace_re());
            let w = v.witness.unwrap();
            assert!(w.op().sub(&a.scale(1.0 / a.trace_re())).max_abs() < 1e-5);
        }
    }

    #[test]
    fn to_set_lower_bounds_every_member() {
        let layout = SystemLayout::chain(2, &["i1", "o1"]).unwrap();
        let cs = comb_constraints::<f64>(layout.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = random_psd(&mut rng, 4);
        let la = LabeledOperator::new(layout.clone(), a.clone()).unwrap();
        let v = d_max_to_set(&la, &cs).unwrap();
        for _ in 0..6 {
            let member =
                HermitianOperator::new(unitary_choi(&random_unitary(&mut rng, 2))).unwrap();
            let lm = LabeledOperator::new(layout.clone(), member.clone()).unwrap();
            assert!(cs.check_point(&[lm]).unwrap().satisfied(1e-8));
            let pair = d_max_pair(&a, &member).unwrap();
            assert!(v.bits <= pair.bits + 1e-7);
        }
    }

    #[test]
    fn to_set_witness_solves_the_program() {
        let layout = SystemLayout::chain(2, &["i1", "o1", "i2", "o2"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for kind in 0..2 {
            let cs = if kind == 0 {
                comb_constraints::<f64>(layout.clone()).unwrap()
            } else {
                dual_comb_constraints::<f64>(layout.clone()).unwrap()
            };
            let a = random_psd(&mut rng, 16);
            let la = LabeledOperator::new(layout.clone(), a.clone()).unwrap();
            let v = d_max_to_set(&la, &cs).unwrap();
            let w = v.witness.clone().unwrap();
            let report = cs.check_point(&[w.clone()]).unwrap();
            assert!(report.satisfied(1e-8), "witness residuals {report:?}");
            let slack = w.op().scale(v.lambda).sub(&a);
            assert!(psd_margin(&slack) > -1e-7 * a.max_abs().max(1.0));
            // Shrinking the scale must break feasibility for the witness.
            let tight = w.op().scale(v.lambda * (1.0 - 1e-5)).sub(&a);
            assert!(psd_margin(&tight) < 0.0);
        }
    }

    #[test]
    fn to_set_zero_operator() {
        let layout = SystemLayout::chain(2, &["i1", "o1"]).unwrap();
        let cs = comb_constraints::<f64>(layout.clone()).unwrap();
        let zero = LabeledOperator::new(layout, H::zeros(4)).unwrap();
        let v = d_max_to_set(&zero, &cs).unwrap();
        assert!(v.bits.is_infinite() && v.bits < 0.0);
        assert!(cs.check_point(&[v.witness.unwrap()]).unwrap().satisfied(1e-8));
    }

    #[test]
    fn to_set_rejects_bad_inputs() {
        let layout = SystemLayout::chain(2, &["i1", "o1"]).unwrap();
        let cs = comb_constraints::<f64>(layout.clone()).unwrap();
        let sz = LabeledOperator::new(layout, diag(&[1.0, -1.0, 0.0, 0.0])).unwrap();
        assert!(matches!(d_max_to_set(&sz, &cs), Err(EntropyError::BadInput(_))));

        let other = SystemLayout::chain(2, &["a", "b"]).unwrap();
        let rho = LabeledOperator::new(other, H::scaled_identity(4, 0.25)).unwrap();
        assert!(d_max_to_set(&rho, &cs).is_err());
    }
}
