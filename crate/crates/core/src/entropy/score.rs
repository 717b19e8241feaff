//! Maximum network scores with matching dual certificates.

use num_traits::Float;

use super::dmax::d_max_to_set;
use super::{EntropyError, ScoreResult};
use crate::linalg::{is_psd, CMatrix, HermitianOperator, SparseHerm, PSD_TOL};
use crate::netmodel::{
    comb_constraints, dual_nosig_constraints, nosig_constraints, ConstraintSet, LabeledOperator,
    SystemLayout,
};
use crate::scalar::FactorScalar;
use crate::sdp::{solve, Block, Coeff, SdpProblem, SdpStatus, SolveOptions};

/// Maximizes the Born pairing `sum_ij omega_ij * x_ij` of a PSD performance
/// operator over a single-block constraint set.
///
/// The certificate comes from the equality multipliers: their combination
/// `Theta = sum_i y_i G_i` pairs to the dual objective value with every
/// member, so `Theta^T / lambda` lies in the dual class and
/// `lambda * gamma - omega` is the (PSD) dual slack, transposed.
pub fn max_score_over<T: FactorScalar>(
    omega: &LabeledOperator<T>,
    cs: &ConstraintSet<T>,
) -> Result<ScoreResult<T>, EntropyError> {
    if cs.n_blocks() != 1 {
        return Err(EntropyError::BadInput("scores over multi-outcome sets are not defined".into()));
    }
    let om = omega.aligned_to(cs.layout())?;
    if !is_psd(om.op()) {
        return Err(EntropyError::BadInput(
            "performance operator is not positive semidefinite".into(),
        ));
    }
    let dual = cs.pre_dual()?;
    if om.op().max_abs() <= T::c(PSD_TOL) {
        // Zero operator: score 0, certified by any dual member at scale 0.
        let network = LabeledOperator::new(cs.layout().clone(), cs.positive_point()[0].clone())?;
        let gamma = LabeledOperator::new(cs.layout().clone(), dual.positive_point()[0].clone())?;
        return Ok(ScoreResult {
            omega_max: T::zero(),
            optimal_network: network,
            dual_certificate: (T::zero(), gamma),
            gap: T::zero(),
        });
    }

    let n = cs.layout().dim();
    let mut p = SdpProblem::new(vec![Block::Psd { dim: n }], true);
    // The Born pairing is the plain trace against the transpose.
    p.set_objective(vec![(0, Coeff::Herm(SparseHerm::from_dense(&om.op().transpose())))]);
    for row in cs.rows() {
        let (_, g) = &row.coeffs[0];
        p.push_row(vec![(0, Coeff::Herm(g.clone()))], row.rhs);
    }
    let sol = solve(&p, &SolveOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(EntropyError::Unattained(format!(
            "score maximization stopped with status {:?} (gap {})",
            sol.status, sol.gap
        )));
    }
    let network = LabeledOperator::new(
        cs.layout().clone(),
        sol.primal[0].herm().expect("block 0 is PSD").clone(),
    )?;

    // Dual objective value and multiplier combination, from original data.
    let mut lambda = T::zero();
    let mut theta = CMatrix::zeros(n, n);
    for (row, &y) in cs.rows().iter().zip(&sol.dual_multipliers) {
        lambda += y * row.rhs;
        row.coeffs[0].1.accumulate(&mut theta, y);
    }
    if !(lambda > T::zero()) {
        return Err(EntropyError::Unattained(format!("nonpositive dual value {lambda}")));
    }
    let gamma_mat = theta.transpose().scale_re(T::one() / lambda).symmetrized();
    let gamma = LabeledOperator::new(cs.layout().clone(), HermitianOperator::new_unchecked(gamma_mat))?;
    let gap = Float::max(Float::max(sol.gap, sol.primal_residual), sol.dual_residual);
    Ok(ScoreResult { omega_max: sol.value, optimal_network: network, dual_certificate: (lambda, gamma), gap })
}

/// Maximum score over causally ordered networks (combs) on `comb_layout`.
///
/// The certificate pair `(lambda, gamma)` has `gamma` a normalized dual
/// comb, so `lambda` equals the scale of the best dominating dual comb.
pub fn max_score_causal<T: FactorScalar>(
    omega: &LabeledOperator<T>,
    comb_layout: &SystemLayout,
) -> Result<ScoreResult<T>, EntropyError> {
    let cs = comb_constraints(comb_layout.clone())?;
    max_score_over(omega, &cs)
}

/// Maximum score over all networks compatible with the parties, with no
/// causal order assumed: the variable ranges over normalized duals of the
/// no-signalling class.
///
/// Solves the problem twice, through independent formulations: the direct
/// maximization, and the smallest scale at which a no-signalling network
/// dominates `omega`. The certificate is the dominating network (its scale
/// inequality holds exactly by construction); `gap` includes the spread
/// between the two routes.
pub fn max_score_noncausal<T: FactorScalar>(
    omega: &LabeledOperator<T>,
    parties: &SystemLayout,
) -> Result<ScoreResult<T>, EntropyError> {
    let primal = max_score_over(omega, &dual_nosig_constraints(parties.clone())?)?;
    let dominating = d_max_to_set(omega, &nosig_constraints(parties.clone())?)?;
    let witness = dominating
        .witness
        .ok_or_else(|| EntropyError::Unattained("dominating network missing".into()))?;
    let spread = Float::abs(primal.omega_max - dominating.lambda);
    Ok(ScoreResult {
        omega_max: primal.omega_max,
        optimal_network: primal.optimal_network,
        dual_certificate: (dominating.lambda, witness),
        gap: Float::max(primal.gap, spread),
    })
}
