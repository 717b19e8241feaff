//! Problem and solution types for the semidefinite solver.

use crate::linalg::{HermitianOperator, SparseHerm};
use crate::scalar::Scalar;

use super::SdpError;

/// One optimization block: a PSD-constrained Hermitian matrix or a single
/// free real scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Psd { dim: usize },
    Free,
}

/// Coefficient of a block inside a row or the objective.
#[derive(Clone, Debug)]
pub enum Coeff<T: Scalar> {
    Herm(SparseHerm<T>),
    Scalar(T),
}

/// One equality `sum_b <coeff_b, X_b> = rhs`.
#[derive(Clone, Debug)]
pub struct SdpRow<T: Scalar> {
    pub coeffs: Vec<(usize, Coeff<T>)>,
    pub rhs: T,
}

/// Linear objective over block variables, optimized subject to the rows and
/// the PSD cone on each `Psd` block.
#[derive(Clone, Debug)]
pub struct SdpProblem<T: Scalar> {
    pub blocks: Vec<Block>,
    pub objective: Vec<(usize, Coeff<T>)>,
    pub rows: Vec<SdpRow<T>>,
    pub maximize: bool,
}

impl<T: Scalar> SdpProblem<T> {
    pub fn new(blocks: Vec<Block>, maximize: bool) -> Self {
        Self { blocks, objective: Vec::new(), rows: Vec::new(), maximize }
    }

    pub fn set_objective(&mut self, objective: Vec<(usize, Coeff<T>)>) {
        self.objective = objective;
    }

    pub fn push_row(&mut self, coeffs: Vec<(usize, Coeff<T>)>, rhs: T) {
        self.rows.push(SdpRow { coeffs, rhs });
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Checks block indices, coefficient shapes and entry finiteness.
    pub fn validate(&self) -> Result<(), SdpError> {
        let check = |coeffs: &[(usize, Coeff<T>)], what: &str| -> Result<(), SdpError> {
            for (b, c) in coeffs {
                let block = self
                    .blocks
                    .get(*b)
                    .ok_or_else(|| SdpError::BadProblem(format!("{what} references block {b}")))?;
                match (block, c) {
                    (Block::Psd { dim }, Coeff::Herm(h)) => {
                        if h.dim() != *dim {
                            return Err(SdpError::BadProblem(format!(
                                "{what}: coefficient dimension {} on block of dimension {dim}",
                                h.dim()
                            )));
                        }
                        if !h.entries().iter().all(|e| e.2.re.is_finite() && e.2.im.is_finite()) {
                            return Err(SdpError::BadProblem(format!("{what}: non-finite coefficient")));
                        }
                    }
                    (Block::Free, Coeff::Scalar(s)) => {
                        if !s.is_finite() {
                            return Err(SdpError::BadProblem(format!("{what}: non-finite coefficient")));
                        }
                    }
                    _ => {
                        return Err(SdpError::BadProblem(format!(
                            "{what}: coefficient shape does not match block {b}"
                        )))
                    }
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (i, row) in self.rows.iter().enumerate() {
            check(&row.coeffs, &format!("row {i}"))?;
            if !row.rhs.is_finite() {
                return Err(SdpError::BadProblem(format!("row {i}: non-finite right-hand side")));
            }
        }
        Ok(())
    }
}

/// Value of one block in a solution.
#[derive(Clone, Debug)]
pub enum BlockValue<T: Scalar> {
    Herm(HermitianOperator<T>),
    Scalar(T),
}

impl<T: Scalar> BlockValue<T> {
    pub fn herm(&self) -> Option<&HermitianOperator<T>> {
        match self {
            BlockValue::Herm(h) => Some(h),
            BlockValue::Scalar(_) => None,
        }
    }

    pub fn scalar(&self) -> Option<T> {
        match self {
            BlockValue::Herm(_) => None,
            BlockValue::Scalar(s) => Some(*s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    /// Converged to the requested tolerances.
    Optimal,
    /// The equalities are inconsistent with the cone; the multipliers hold
    /// a separating certificate.
    PrimalInfeasible,
    /// The objective is unbounded over the feasible set; the primal blocks
    /// hold an improving ray.
    DualInfeasible,
    /// Stopped without reaching the requested tolerances.
    Inaccurate,
}

/// Solver output. For `Optimal`, `primal` and the multipliers satisfy the
/// reported residuals; the dual slack per PSD block is
/// `sum_i y_i A_i - C` when maximizing and `C - sum_i y_i A_i` when
/// minimizing, so it is PSD at optimality either way.
#[derive(Clone, Debug)]
pub struct SdpSolution<T: Scalar> {
    pub status: SdpStatus,
    pub value: T,
    pub primal: Vec<BlockValue<T>>,
    pub dual_multipliers: Vec<T>,
    pub dual_slacks: Vec<BlockValue<T>>,
    pub primal_residual: T,
    pub dual_residual: T,
    pub gap: T,
    pub iterations: usize,
}

/// Stopping targets. `accept_*` are the looser thresholds under which a
/// stalled run still counts as `Optimal`.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions<T> {
    pub feas_tol: T,
    pub gap_tol: T,
    pub accept_feas: T,
    pub accept_gap: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            feas_tol: T::c(1e-9),
            gap_tol: T::c(1e-9),
            accept_feas: T::c(1e-8),
            accept_gap: T::c(1e-7),
            max_iter: 120,
        }
    }
}
