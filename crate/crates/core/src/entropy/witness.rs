//! Single-shot discrimination witness for pairs of networks.
//!
//! The max relative distance between two members of a network class is
//! operationally reachable: one fixed interaction collapses both networks to
//! states at the same distance. The interaction is the purification of a
//! full-rank element of the dual class, and acting on a member `C` it
//! produces `sqrt(g) C sqrt(g)`, a congruence that preserves the distance
//! and normalizes the trace to the dual pairing, which is 1.

use num_traits::Float;

use super::dmax::d_max_pair;
use super::{EntropyError, EntropyValue};
use crate::linalg::{eigh, HermitianOperator, SUPPORT_TOL};
use crate::netmodel::{ConstraintSet, LabeledOperator, Role, SystemInfo, SystemLayout};
use crate::scalar::FactorScalar;

/// Max relative distance between the networks `c0` and `c1` of the class
/// `cs`, together with a single interaction network `e` realizing it on
/// states: linking either network with `e` leaves a unit-trace state on the
/// appended reference system, and the two states are exactly as
/// distinguishable as the networks.
///
/// The reference system mirrors the full class space; its label is the
/// class labels joined by `.` so it cannot collide with them. Fails with
/// `Unattained` if the dual class has no full-rank base point.
pub fn network_dmax_witness<T: FactorScalar>(
    c0: &LabeledOperator<T>,
    c1: &LabeledOperator<T>,
    cs: &ConstraintSet<T>,
) -> Result<(EntropyValue<T>, LabeledOperator<T>), EntropyError> {
    if cs.n_blocks() != 1 {
        return Err(EntropyError::BadInput(format!(
            "expected a single-network class, got {} blocks",
            cs.n_blocks()
        )));
    }
    let a0 = c0.aligned_to(cs.layout())?;
    let a1 = c1.aligned_to(cs.layout())?;
    for (name, a) in [("first", &a0), ("second", &a1)] {
        let report = cs.check_point(std::slice::from_ref(a))?;
        if !report.satisfied(T::c(1e-6)) {
            return Err(EntropyError::BadInput(format!(
                "{name} operator is not in the class (equality residual {}, smallest eigenvalue {})",
                report.max_equality_residual, report.min_psd_margin
            )));
        }
    }
    let value = d_max_pair(a0.op(), a1.op())?;

    let dual = cs.pre_dual()?;
    let gamma = &dual.positive_point()[0];
    let spec = eigh(gamma);
    if spec.min() <= T::c(SUPPORT_TOL) * Float::max(spec.max(), T::one()) {
        return Err(EntropyError::Unattained(
            "dual class has no full-rank base point".into(),
        ));
    }
    // Purify gamma^T: |psi> = sum_i sqrt(g_i) |conj(v_i)> (x) |v_i>, so the
    // partial trace over the reference returns gamma^T and linking a member
    // C gives sqrt(gamma) C sqrt(gamma).
    let n = cs.layout().dim();
    let v = &spec.vectors;
    let mut psi = vec![num_complex::Complex::new(T::zero(), T::zero()); n * n];
    for (i, &g) in spec.values.iter().enumerate() {
        let r = Float::sqrt(Float::max(g, T::zero()));
        for a in 0..n {
            for b in 0..n {
                psi[a * n + b] = psi[a * n + b] + v[(a, i)].conj() * v[(b, i)] * r;
            }
        }
    }
    let e = HermitianOperator::dyad(&psi);

    let ref_label = cs.layout().labels().join(".");
    let n_steps = cs.layout().n_steps();
    let mut systems: Vec<SystemInfo> = cs
        .layout()
        .systems()
        .iter()
        .map(|s| {
            let role = match s.role {
                Role::In => Role::Out,
                Role::Out => Role::In,
            };
            SystemInfo::new(s.label.clone(), s.dim, role, s.step)
        })
        .collect();
    systems.push(SystemInfo::new(ref_label, n, Role::Out, n_steps.max(1)));
    let layout = SystemLayout::new(systems)?;
    Ok((value, LabeledOperator::new(layout, e)?))
}
