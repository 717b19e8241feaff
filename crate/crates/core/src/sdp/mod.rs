//! Semidefinite programming over block variables.
//!
//! Problems optimize a real linear functional of Hermitian PSD blocks and
//! free real scalars subject to affine equalities. The pipeline eliminates
//! free scalars, normalizes and deduplicates rows, embeds complex data into
//! real symmetric form when needed, and runs a primal-dual interior-point
//! method. Solutions carry both the optimizer and the dual multipliers, so
//! callers can hand out independently checkable certificates.

mod ipm;
mod presolve;
mod problem;
mod real;
mod solve;

pub use problem::{Block, BlockValue, Coeff, SdpProblem, SdpRow, SdpSolution, SdpStatus, SolveOptions};
pub use solve::{solve, verify_certificates, CertificateReport};

use thiserror::Error;

/// Errors from problem assembly or the solver itself.
#[derive(Debug, Error)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    BadProblem(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}
