//! Probabilistic operations: instruments as lists of branch operators.

use super::constraints::{ConstraintSet, ValidationReport};
use super::labeled::LabeledOperator;
use super::layout::SystemLayout;
use super::NetError;
use crate::linalg::{psd_margin, HermitianOperator};
use crate::scalar::{FactorScalar, Scalar};

/// A finite-outcome operation: branch operators summing to a deterministic
/// network of the class the instrument is validated against.
#[derive(Clone, Debug)]
pub struct Instrument<T: Scalar> {
    layout: SystemLayout,
    elements: Vec<HermitianOperator<T>>,
}

impl<T: Scalar> Instrument<T> {
    /// Collects branch operators, aligning all of them to the layout of the
    /// first.
    pub fn new(elements: Vec<LabeledOperator<T>>) -> Result<Self, NetError> {
        let first = elements.first().ok_or_else(|| NetError::BadLayout("instrument needs at least one branch".into()))?;
        let layout = first.layout().clone();
        let elements = elements
            .iter()
            .map(|e| Ok(e.aligned_to(&layout)?.into_op()))
            .collect::<Result<Vec<_>, NetError>>()?;
        Ok(Self { layout, elements })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn n_outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[HermitianOperator<T>] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> LabeledOperator<T> {
        LabeledOperator::new(self.layout.clone(), self.elements[k].clone())
            .expect("branch dimensions fixed at construction")
    }

    /// Sum of all branches.
    pub fn total(&self) -> LabeledOperator<T> {
        let mut acc = self.elements[0].clone();
        for e in &self.elements[1..] {
            acc = acc.add(e);
        }
        LabeledOperator::new(self.layout.clone(), acc).expect("branch dimensions fixed at construction")
    }
}

impl<T: FactorScalar> Instrument<T> {
    /// Checks that every branch is positive and the branch sum satisfies the
    /// given deterministic-class rows.
    pub fn validate(&self, class: &ConstraintSet<T>) -> Result<ValidationReport<T>, NetError> {
        let total = self.total();
        let max_equality_residual = class.equality_residual(std::slice::from_ref(&total))?;
        let mut min_psd_margin = T::infinity();
        for e in &self.elements {
            min_psd_margin = num_traits::Float::min(min_psd_margin, psd_margin(e));
        }
        Ok(ValidationReport { max_equality_residual, min_psd_margin })
    }
}
