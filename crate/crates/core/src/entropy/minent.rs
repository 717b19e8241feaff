//! Conditional min-entropies of states, networks and tests.
//!
//! All three reduce to one program shape: the smallest `lambda` such that
//! `lambda * (g (x) I)` dominates a target operator while `g` ranges over a
//! conditioning comb class. States condition on a prepared density matrix,
//! networks on the comb of the earlier steps, tests on the comb that feeds
//! the tested network.

use num_traits::Float;

use super::{EntropyError, EntropyValue};
use crate::linalg::{eigh, is_psd, HermitianOperator, SparseHerm, PSD_TOL};
use crate::netmodel::{
    comb_constraints, embed_factors, herm_basis, traceless_herm_basis, LabeledOperator, Role,
    SystemInfo, SystemLayout,
};
use crate::scalar::{FactorScalar, Scalar};
use crate::sdp::{solve, Block, Coeff, SdpProblem, SdpStatus, SolveOptions};

/// Network min-entropy of the last step and the fidelity `2^-H / d_out`
/// with which the last output can be made maximally entangled with a
/// reference fed by the earlier steps.
#[derive(Clone, Debug)]
pub struct NetworkEntropy<T: Scalar> {
    pub entropy: EntropyValue<T>,
    pub f_max: T,
}

/// Test min-entropy and the highest probability `2^-H` with which any
/// network passes the test.
#[derive(Clone, Debug)]
pub struct TestEntropy<T: Scalar> {
    pub entropy: EntropyValue<T>,
    pub p_max: T,
}

/// Smallest `lambda` with `lambda * (g (x) I_rest) >= target` over the combs
/// `g` on `cond_layout`, plus the optimal `g`.
///
/// Linearized exactly like `d_max_to_set`: the scaled variable `G = lambda*g`
/// obeys the homogenized comb rows, and the domination enters as the full
/// space equality `G (x) I - S = target` with a PSD slack `S`, expanded over
/// a product basis so that only the identity-on-rest components touch `G`.
/// An empty conditioning layout leaves the scalar 1, making the program the
/// largest eigenvalue of the target.
fn min_scale_over_conditioning<T: FactorScalar>(
    target: &LabeledOperator<T>,
    cond_layout: SystemLayout,
) -> Result<(T, LabeledOperator<T>), EntropyError> {
    let layout = target.layout();
    let cond_labels = cond_layout.labels();
    let cond_pos = layout.positions(&cond_labels)?;
    let rest_pos: Vec<usize> =
        (0..layout.len()).filter(|i| !cond_pos.contains(i)).collect();

    if cond_layout.n_steps() == 0 {
        let lambda = Float::max(eigh(target.op()).max(), T::zero());
        let witness = LabeledOperator::new(cond_layout, HermitianOperator::identity(1))?;
        return Ok((lambda, witness));
    }
    let cond = comb_constraints::<T>(cond_layout.clone())?;
    if target.op().max_abs() <= T::c(PSD_TOL) {
        let witness = LabeledOperator::new(cond_layout, cond.positive_point()[0].clone())?;
        return Ok((T::zero(), witness));
    }

    let dims = layout.dims();
    let q = cond_layout.dim();
    let n = layout.dim();
    let d_rest = layout.dim_of(&rest_pos);
    let rest_scale = Float::sqrt(T::c(d_rest as f64));
    let ident_rest = SparseHerm::<T>::identity(d_rest).scale(T::one() / rest_scale);

    let mut p = SdpProblem::new(
        vec![Block::Psd { dim: q }, Block::Psd { dim: n }, Block::Free],
        false,
    );
    p.set_objective(vec![(2, Coeff::Scalar(T::one()))]);
    for row in cond.rows() {
        let (_, g) = &row.coeffs[0];
        let mut coeffs = vec![(0, Coeff::Herm(g.clone()))];
        if row.rhs != T::zero() {
            coeffs.push((2, Coeff::Scalar(-row.rhs)));
        }
        p.push_row(coeffs, T::zero());
    }
    for e in herm_basis::<T>(q) {
        for f in traceless_herm_basis::<T>(d_rest) {
            let g = embed_factors(&dims, &[(&cond_pos, &e), (&rest_pos, &f)]);
            let rhs = -g.inner(target.mat());
            p.push_row(vec![(1, Coeff::Herm(g))], rhs);
        }
        let g = embed_factors(&dims, &[(&cond_pos, &e), (&rest_pos, &ident_rest)]);
        let rhs = g.inner(target.mat());
        p.push_row(
            vec![
                (0, Coeff::Herm(e.clone().scale(rest_scale))),
                (1, Coeff::Herm(g.scale(-T::one()))),
            ],
            rhs,
        );
    }
    let sol = solve(&p, &SolveOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(EntropyError::Unattained(format!(
            "conditioning scale minimization stopped with status {:?} (gap {})",
            sol.status, sol.gap
        )));
    }
    let lambda = sol.value;
    if !(lambda > T::zero()) {
        return Err(EntropyError::Unattained(format!("nonpositive optimal scale {lambda}")));
    }
    let g_mat = sol.primal[0]
        .herm()
        .expect("block 0 is PSD")
        .mat()
        .scale_re(T::one() / lambda)
        .symmetrized();
    let witness = LabeledOperator::new(cond_layout, HermitianOperator::new_unchecked(g_mat))?;
    Ok((lambda, witness))
}

/// Conditional min-entropy of the rest of `rho` given the systems in
/// `cond`, in bits: `-log2 min { lambda : lambda * (I (x) g) >= rho }` over
/// states `g` on the conditioning systems. The witness is the optimal `g`.
///
/// An empty `cond` gives the unconditioned min-entropy
/// `-log2 lambda_max(rho)`.
pub fn cond_min_entropy_state<T: FactorScalar>(
    rho: &LabeledOperator<T>,
    cond: &[&str],
) -> Result<EntropyValue<T>, EntropyError> {
    if !is_psd(rho.op()) || Float::abs(rho.trace_re() - T::one()) > T::c(1e-6) {
        return Err(EntropyError::BadInput("operator is not a state".into()));
    }
    let b_pos = rho.layout().positions(cond)?;
    let mut seen = b_pos.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != b_pos.len() {
        return Err(EntropyError::BadInput("conditioning labels repeat".into()));
    }
    // States are the one-step preparation combs on the conditioning systems.
    let systems: Vec<SystemInfo> = b_pos
        .iter()
        .map(|&i| {
            let s = &rho.layout().systems()[i];
            SystemInfo::new(s.label.clone(), s.dim, Role::Out, 1)
        })
        .collect();
    let cond_layout = SystemLayout::new(systems)?;
    let (lambda, witness) = min_scale_over_conditioning(rho, cond_layout)?;
    Ok(EntropyValue::from_lambda(T::one() / lambda, Some(witness)))
}

/// Min-entropy of the last step of the comb `d`, conditioned on its earlier
/// steps: the conditioning runs over combs on steps `1..N-1` and the
/// identity covers the full last step. For `N = 1` the conditioning comb
/// degenerates to the scalar 1.
///
/// `f_max = 2^-H / d_lastout` is the best fidelity between the maximally
/// entangled state and the last output entangled with a reference built by
/// interacting over the earlier steps.
pub fn network_min_entropy<T: FactorScalar>(
    d: &LabeledOperator<T>,
    comb_layout: &SystemLayout,
) -> Result<NetworkEntropy<T>, EntropyError> {
    let cs = comb_constraints::<T>(comb_layout.clone())?;
    let al = d.aligned_to(comb_layout)?;
    let report = cs.check_point(&[al.clone()])?;
    if !report.satisfied(T::c(1e-6)) {
        return Err(EntropyError::BadInput(format!(
            "operator is not a comb on the layout (equality residual {}, smallest eigenvalue {})",
            report.max_equality_residual, report.min_psd_margin
        )));
    }
    let n_steps = comb_layout.n_steps();
    let prefix_pos: Vec<usize> = (0..comb_layout.len())
        .filter(|&i| comb_layout.systems()[i].step < n_steps)
        .collect();
    let cond_layout = comb_layout.select(&prefix_pos);
    let (lambda, witness) = min_scale_over_conditioning(&al, cond_layout)?;
    let d_lastout = T::c(comb_layout.dim_of(&comb_layout.step_positions(n_steps, Role::Out)) as f64);
    Ok(NetworkEntropy {
        entropy: EntropyValue::from_lambda(T::one() / lambda, Some(witness)),
        f_max: lambda / d_lastout,
    })
}

/// Min-entropy of a test with pass operator `t_yes` on the given network
/// layout: the conditioning runs over the combs feeding the tested network
/// (each output of the layout becomes an input of the next conditioning
/// step) and the identity covers only the last output.
///
/// `p_max = 2^-H` is the highest probability with which a causal network
/// passes the test, equal to the maximum Born pairing with `t_yes`.
pub fn test_min_entropy<T: FactorScalar>(
    t_yes: &LabeledOperator<T>,
    layout: &SystemLayout,
) -> Result<TestEntropy<T>, EntropyError> {
    let n_steps = layout.n_steps();
    if n_steps == 0 {
        return Err(EntropyError::BadInput("test layout has no steps".into()));
    }
    let al = t_yes.aligned_to(layout)?;
    if !is_psd(al.op()) {
        return Err(EntropyError::BadInput("test operator is not positive semidefinite".into()));
    }
    let shifted: Vec<SystemInfo> = layout
        .systems()
        .iter()
        .filter_map(|s| match s.role {
            Role::In => Some(SystemInfo::new(s.label.clone(), s.dim, Role::Out, s.step)),
            Role::Out if s.step < n_steps => {
                Some(SystemInfo::new(s.label.clone(), s.dim, Role::In, s.step + 1))
            }
            Role::Out => None,
        })
        .collect();
    let cond_layout = SystemLayout::new(shifted)?;
    let (lambda, witness) = min_scale_over_conditioning(&al, cond_layout)?;
    Ok(TestEntropy {
        entropy: EntropyValue::from_lambda(T::one() / lambda, Some(witness)),
        p_max: lambda,
    })
}
