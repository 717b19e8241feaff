//! Network model: labeled system layouts, Choi operators on them, the link
//! product, and the affine constraint sets of the network classes the
//! optimizers range over.

mod affine;
mod constraints;
mod instrument;
mod labeled;
mod layout;

pub use affine::{dual_affine_basis, dual_nosig_constraints, DualAffineBasis, AFFINE_DIM_GUARD};
pub use constraints::{
    comb_constraints, dual_comb_constraints, nosig_constraints, tester_constraints, ConstraintRow,
    ConstraintSet, SetKind, ValidationReport, MAX_PARTIES,
};
pub use instrument::Instrument;
pub use labeled::{born_probability, link_product, LabeledOperator};
pub use layout::{Role, SystemInfo, SystemLayout};

pub(crate) use affine::{unvec_herm, vec_herm, vec_sparse};
pub(crate) use constraints::{herm_basis, traceless_herm_basis};
pub(crate) use labeled::embed_factors;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("invalid layout: {0}")]
    BadLayout(String),
    #[error("unknown system label '{0}'")]
    UnknownLabel(String),
    #[error("operators live on different label sets")]
    LabelMismatch,
    #[error("layout dimension {layout} does not match operator dimension {operator}")]
    DimMismatch { layout: usize, operator: usize },
    #[error("expected {expected} operator blocks, found {found}")]
    BlockCount { expected: usize, found: usize },
    #[error("subset enumeration supports at most {} parties, found {found}", super::netmodel::MAX_PARTIES)]
    TooManyParties { found: usize },
    #[error("dimension {dim} exceeds the dense analysis guard {guard}")]
    TooLarge { dim: usize, guard: usize },
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
