//! Twirled performance operators for the gate tasks: inversion, charge
//! conjugation and controlization, plus the estimate-and-prepare baseline.
//!
//! Each operator is a group average of a fidelity integrand; averaging is
//! evaluated through the invariant projectors it collapses to, so these
//! builders are exact. [`mc_twirl`](super::mc_twirl) reaches the same
//! operators by direct sampling and serves as the independent oracle.

use num_complex::Complex;

use crate::linalg::{CMatrix, HermitianOperator};
use crate::netmodel::{link_product, LabeledOperator, Role, SystemInfo, SystemLayout};
use crate::scalar::Scalar;

use super::haar::{controlled_choi, gate_choi};
use super::resources::{entangled_resources, loose_layout, real, reframed, sym_antisym};
use super::AppError;

/// Comb layout for one gate use between a global input and output:
/// the network receives `0`, calls the gate through `1 -> 2`, emits `3`.
pub(crate) fn gate_chain(d: usize) -> SystemLayout {
    SystemLayout::chain(d, &["0", "1", "2", "3"]).expect("valid chain")
}

/// Layout of controlization networks: gate input `0` and control `Q`
/// enter at step 1, the gate is called through `1 -> 2`, the controlled
/// action leaves on `3` with the control returned on `Qp`.
pub(crate) fn ctrl_chain(d: usize) -> SystemLayout {
    SystemLayout::new(vec![
        SystemInfo::new("0", d, Role::In, 1),
        SystemInfo::new("Q", 2, Role::In, 1),
        SystemInfo::new("1", d, Role::Out, 1),
        SystemInfo::new("2", d, Role::In, 2),
        SystemInfo::new("3", d, Role::Out, 2),
        SystemInfo::new("Qp", 2, Role::Out, 2),
    ])
    .expect("valid layout")
}

/// A two-system operator placed on the labeled pair `(hi, lo)`.
fn pair_on<T: Scalar>(
    hi: &str,
    lo: &str,
    d: usize,
    p: &HermitianOperator<T>,
) -> LabeledOperator<T> {
    LabeledOperator::new(loose_layout(&[(hi, d), (lo, d)]), p.clone()).expect("dimensions match")
}

/// Performance operator for inverting one use of an unknown gate.
///
/// Averaging the fidelity integrand over the gate gives
/// `(1/d^2) (P+_{31} (x) P+_{20} / d_+  +  P-_{31} (x) P-_{20} / d_-)`:
/// the two-copy projectors pair the final output `3` with the gate input
/// `1`, and the gate output `2` with the initial input `0`. The operator
/// commutes with `U_2 (x) U_0` and with `U_3 (x) U_1` for every unitary.
pub fn omega_inversion<T: Scalar>(d: usize) -> Result<LabeledOperator<T>, AppError> {
    let pair = sym_antisym::<T>(d)?;
    let dd = real::<T>(d * d);
    let plus = pair_on("3", "1", d, &pair.p_plus).tensor(&pair_on("2", "0", d, &pair.p_plus))?;
    let minus = pair_on("3", "1", d, &pair.p_minus).tensor(&pair_on("2", "0", d, &pair.p_minus))?;
    let sum = plus
        .scale(T::one() / (dd * real::<T>(pair.d_plus)))
        .add(&minus.scale(T::one() / (dd * real::<T>(pair.d_minus))))?;
    Ok(reframed(&sum, &gate_chain(d))?)
}

/// Performance operator for charge-conjugating one use of an unknown gate.
///
/// Same average as [`omega_inversion`] with the pairing `(3,2)` and
/// `(1,0)`: both wire pairs see the gate's conjugate representation, so
/// the projectors couple the final output to the gate output and the gate
/// input to the initial input.
pub fn omega_conjugation<T: Scalar>(d: usize) -> Result<LabeledOperator<T>, AppError> {
    let pair = sym_antisym::<T>(d)?;
    let dd = real::<T>(d * d);
    let plus = pair_on("3", "2", d, &pair.p_plus).tensor(&pair_on("1", "0", d, &pair.p_plus))?;
    let minus = pair_on("3", "2", d, &pair.p_minus).tensor(&pair_on("1", "0", d, &pair.p_minus))?;
    let sum = plus
        .scale(T::one() / (dd * real::<T>(pair.d_plus)))
        .add(&minus.scale(T::one() / (dd * real::<T>(pair.d_minus))))?;
    Ok(reframed(&sum, &gate_chain(d))?)
}

/// Control-branch averages on the gate wires `3,2,1,0`, without the
/// control qubits but already carrying the common prefactor `1/(4d^2)`.
///
/// The off branch (control 0) averages to `E_{30} (x) I_{21}` and is
/// invariant under `U_3 (x) conj(U)_0`; the on branch (control 1)
/// averages to `E_{32} (x) E_{10} + Eperp_{32} (x) Eperp_{10} / dperp`
/// and is invariant under `U_3 (x) conj(U)_2` and `conj(U)_1 (x) U_0`.
pub(crate) fn ctrl_branches<T: Scalar>(
    d: usize,
) -> Result<(LabeledOperator<T>, LabeledOperator<T>), AppError> {
    let res = entangled_resources::<T>(d)?;
    let pref = T::one() / real::<T>(4 * d * d);
    let id = HermitianOperator::identity(d * d);
    let off = pair_on("3", "0", d, &res.e_projector).tensor(&pair_on("2", "1", d, &id))?;
    let on = pair_on("3", "2", d, &res.e_projector)
        .tensor(&pair_on("1", "0", d, &res.e_projector))?
        .add(
            &pair_on("3", "2", d, &res.e_perp)
                .tensor(&pair_on("1", "0", d, &res.e_perp))?
                .scale(T::one() / real::<T>(res.d_perp)),
        )?;
    Ok((off.scale(pref), on.scale(pref)))
}

/// Performance operator for adding coherent control to an unknown gate.
///
/// The network receives the control on `Q` and must return it on `Qp`;
/// the score compares the realized channel with the controlled gate.
/// Averaging leaves the two classical control branches
/// `Omega = Omega_off (x) |00><00| + Omega_on (x) |11><11|` on `(Qp, Q)`,
/// with the branches of [`ctrl_branches`]. The optimum is 1/2 at every
/// dimension, met by routing classically on the measured control.
pub fn omega_controlization<T: Scalar>(d: usize) -> Result<LabeledOperator<T>, AppError> {
    let (off, on) = ctrl_branches::<T>(d)?;
    let flag = |k: usize| {
        let mut v = vec![Complex::new(T::zero(), T::zero()); 4];
        v[k * 2 + k] = Complex::new(T::one(), T::zero());
        LabeledOperator::new(loose_layout(&[("Qp", 2), ("Q", 2)]), HermitianOperator::dyad(&v))
            .expect("dimensions match")
    };
    let omega = off.tensor(&flag(0))?.add(&on.tensor(&flag(1))?)?;
    Ok(reframed(&omega, &ctrl_chain(d))?)
}

/// `|I>><<I|` on the labeled pair, the identity-channel Choi.
fn ident_pair<T: Scalar>(a: &str, b: &str, d: usize) -> LabeledOperator<T> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); d * d];
    for i in 0..d {
        v[i * d + i] = Complex::new(T::one(), T::zero());
    }
    LabeledOperator::new(loose_layout(&[(a, d), (b, d)]), HermitianOperator::dyad(&v))
        .expect("dimensions match")
}

/// Benchmark strategy for controlization: measure the control, route the
/// input through the gate on outcome 1, bypass the gate on outcome 0
/// (feeding it a fixed state and discarding its output). Scores exactly
/// 1/2 against [`omega_controlization`], which is optimal.
pub fn controlization_classical<T: Scalar>(d: usize) -> Result<LabeledOperator<T>, AppError> {
    if d < 2 {
        return Err(AppError::BadInput(format!("controlization needs d >= 2, got {d}")));
    }
    let flag = |k: usize| {
        let mut v = vec![Complex::new(T::zero(), T::zero()); 4];
        v[k * 2 + k] = Complex::new(T::one(), T::zero());
        LabeledOperator::new(loose_layout(&[("Qp", 2), ("Q", 2)]), HermitianOperator::dyad(&v))
            .expect("dimensions match")
    };
    let sigma = LabeledOperator::new(
        loose_layout(&[("1", d)]),
        HermitianOperator::scaled_identity(d, T::one() / real::<T>(d)),
    )?;
    let discard = LabeledOperator::new(loose_layout(&[("2", d)]), HermitianOperator::identity(d))?;
    let off_branch = ident_pair("0", "3", d).tensor(&sigma)?.tensor(&discard)?;
    let on_branch = ident_pair("0", "1", d).tensor(&ident_pair("2", "3", d))?;
    let network = off_branch.tensor(&flag(0))?.add(&on_branch.tensor(&flag(1))?)?;
    Ok(reframed(&network, &ctrl_chain(d))?)
}

/// Channel fidelity between a controlization network's realized action on
/// the gate `u` and the ideal controlled gate: the gate is plugged into
/// the network's `1 -> 2` slot and the resulting Choi operator is overlapped
/// with the controlled-gate Choi, normalized by its norm `4 d^2`.
pub fn controlization_fidelity<T: Scalar>(
    network: &LabeledOperator<T>,
    u: &CMatrix<T>,
) -> Result<T, AppError> {
    let d = u.n_rows();
    let target = controlled_choi(u);
    let realized = link_product(network, &gate_choi(u, "1", "2"))?;
    let aligned = realized.aligned_to(target.layout())?;
    Ok(aligned.op().inner(target.op()) / real::<T>(4 * d * d))
}

/// Best average fidelity for estimating an unknown gate and preparing the
/// estimate: `2 / d^2`. This equals the inversion optimum, so coherently
/// inverting a single gate use is exactly as good as measuring it.
pub fn estimation_baseline<T: Scalar>(d: usize) -> Result<T, AppError> {
    if d < 2 {
        return Err(AppError::BadInput(format!("estimation baseline needs d >= 2, got {d}")));
    }
    Ok(real::<T>(2) / real::<T>(d * d))
}
