//! Dense complex linear algebra for composite quantum systems.
//!
//! Matrices are dense and row-major with the first subsystem as the most
//! significant Kronecker factor. Intended for desk-scale operators
//! (total dimension up to a few hundred).

mod decomp;
mod herm;
mod matrix;
mod sparse;

pub use decomp::{eigh, is_psd, psd_margin, sqrt_psd, support_pinv_sqrt, Spectrum, PSD_TOL, SUPPORT_TOL};
pub use herm::{HermitianOperator, HERMITICITY_TOL};
pub use matrix::{kron, kron_all, partial_trace, partial_transpose, permute_systems, CMatrix};
pub use sparse::SparseHerm;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({n_rows}x{n_cols})")]
    NotSquare { n_rows: usize, n_cols: usize },
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("subsystem dimensions multiply to {expected}, matrix has dimension {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("invalid subsystem index list")]
    BadSubsystem,
    #[error("operator has a negative eigenvalue beyond tolerance (min {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
}
