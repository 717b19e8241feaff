//! Quantum networks as Choi operators: constraint sets for combs, testers and
//! no-signalling channels, a semidefinite-programming optimizer for
//! network performance, and the associated one-shot entropic quantities.

pub mod apps;
pub mod entropy;
pub mod io;
pub mod linalg;
pub mod netmodel;
pub mod scalar;
pub mod sdp;
pub mod verify;

pub use scalar::{FactorScalar, Scalar};

/// Concrete f64 aliases for the generic core types.
pub type Real = f64;
pub type CMat = linalg::CMatrix<f64>;
pub type Herm = linalg::HermitianOperator<f64>;
pub type Labeled = netmodel::LabeledOperator<f64>;
pub type Constraints = netmodel::ConstraintSet<f64>;
pub type Problem = sdp::SdpProblem<f64>;
pub type Solution = sdp::SdpSolution<f64>;





