//! One-shot entropic quantities over networks.
//!
//! Everything here reduces to a small semidefinite program plus spectral
//! post-processing: the max relative entropy between two operators or from
//! an operator to a whole constraint set, conditional min-entropies of
//! states, networks and tests, and the maximum score a network class can
//! reach against a performance operator. All values are in bits (log base
//! 2), matching the `2^value` scaling rules the quantities obey.

mod dmax;
mod minent;
mod score;
mod witness;

pub use dmax::{d_max_pair, d_max_to_set};
pub use minent::{
    cond_min_entropy_state, network_min_entropy, test_min_entropy, NetworkEntropy, TestEntropy,
};
pub use score::{max_score_causal, max_score_noncausal, max_score_over};
pub use witness::network_dmax_witness;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::netmodel::{LabeledOperator, NetError};
use crate::scalar::Scalar;
use crate::sdp::SdpError;

/// Errors from the entropy-level optimizers.
#[derive(Debug, Error)]
pub enum EntropyError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("optimum not attained: {0}")]
    Unattained(String),
}

/// An entropic value in bits together with `lambda = 2^bits`, the optimal
/// scale factor of the defining program, and the operator attaining it.
///
/// `bits` may be `+inf` (no finite scale works) or `-inf` (the compared
/// operator vanishes); `lambda` is then `inf` or `0` accordingly.
#[derive(Clone, Debug)]
pub struct EntropyValue<T: Scalar> {
    /// Value in bits, log base 2.
    pub bits: T,
    /// `2^bits` computed without rounding through the logarithm.
    pub lambda: T,
    /// Optimizer of the defining program, when the program has one: the
    /// closest set member for set relative entropies, the conditioning
    /// state or comb for min-entropies.
    pub witness: Option<LabeledOperator<T>>,
}

impl<T: Scalar> EntropyValue<T> {
    /// Value whose optimal scale is `lambda >= 0`; `bits = log2(lambda)`.
    pub(crate) fn from_lambda(lambda: T, witness: Option<LabeledOperator<T>>) -> Self {
        Self { bits: num_traits::Float::log2(lambda), lambda, witness }
    }

    pub(crate) fn infinite() -> Self {
        Self { bits: T::infinity(), lambda: T::infinity(), witness: None }
    }
}

/// Maximum score of a network class against a performance operator.
///
/// `optimal_network` attains `omega_max` under the Born pairing and lies in
/// the optimized class; `dual_certificate = (lambda, gamma)` proves the
/// bound from above: `gamma` is in the dual class and
/// `lambda * gamma - omega` is positive semidefinite up to `1e-8`.
#[derive(Clone, Debug)]
pub struct ScoreResult<T: Scalar> {
    /// Largest Born pairing of `omega` with a member of the class.
    pub omega_max: T,
    /// Class member attaining the maximum.
    pub optimal_network: LabeledOperator<T>,
    /// Scale and dual-class member certifying `omega <= lambda * gamma`.
    pub dual_certificate: (T, LabeledOperator<T>),
    /// Numerical uncertainty of `omega_max` (solver gap and residuals).
    pub gap: T,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_and_bits_stay_consistent() {
        let v = EntropyValue::<f64>::from_lambda(0.375, None);
        assert!((v.bits - 0.375f64.log2()).abs() < 1e-15);
        assert!((v.bits.exp2() - v.lambda).abs() < 1e-15);

        let zero = EntropyValue::<f64>::from_lambda(0.0, None);
        assert!(zero.bits.is_infinite() && zero.bits < 0.0);
        assert_eq!(zero.lambda, 0.0);

        let inf = EntropyValue::<f64>::infinite();
        assert!(inf.bits.is_infinite() && inf.bits > 0.0);
        assert!(inf.lambda.is_infinite());
    }
}
