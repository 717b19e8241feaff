//! JSON serialization of labeled operators and layouts.
//!
//! An operator file lists the system layout and the full matrix row-major,
//! each entry as an `[re, im]` pair. Loading validates dimensions and
//! Hermiticity, so malformed files are rejected rather than silently
//! symmetrized.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::CMatrix;
use crate::netmodel::{LabeledOperator, NetError, SystemInfo, SystemLayout};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    File(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("inconsistent data: {0}")]
    BadData(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Serialized form of a labeled Hermitian operator.
#[derive(Serialize, Deserialize)]
pub struct OperatorJson {
    pub systems: Vec<SystemInfo>,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl OperatorJson {
    pub fn from_operator(op: &LabeledOperator<f64>) -> Self {
        let d = op.dim();
        let entries = (0..d)
            .map(|i| (0..d).map(|j| [op.mat()[(i, j)].re, op.mat()[(i, j)].im]).collect())
            .collect();
        Self { systems: op.layout().systems().to_vec(), entries }
    }

    pub fn into_operator(self) -> Result<LabeledOperator<f64>, IoError> {
        let layout = SystemLayout::new(self.systems)?;
        let d = layout.dim();
        if self.entries.len() != d {
            return Err(IoError::BadData(format!("expected {d} rows, found {}", self.entries.len())));
        }
        let mut m = CMatrix::zeros(d, d);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != d {
                return Err(IoError::BadData(format!("row {i} has {} entries, expected {d}", row.len())));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(IoError::BadData(format!("non-finite entry at ({i}, {j})")));
                }
                m[(i, j)] = Complex::new(re, im);
            }
        }
        Ok(LabeledOperator::from_matrix(layout, m)?)
    }
}

pub fn operator_to_string(op: &LabeledOperator<f64>) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(&OperatorJson::from_operator(op))?)
}

pub fn operator_from_str(s: &str) -> Result<LabeledOperator<f64>, IoError> {
    serde_json::from_str::<OperatorJson>(s)?.into_operator()
}

pub fn save_operator(path: impl AsRef<Path>, op: &LabeledOperator<f64>) -> Result<(), IoError> {
    Ok(std::fs::write(path, operator_to_string(op)?)?)
}

pub fn load_operator(path: impl AsRef<Path>) -> Result<LabeledOperator<f64>, IoError> {
    operator_from_str(&std::fs::read_to_string(path)?)
}

pub fn layout_to_string(layout: &SystemLayout) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(layout)?)
}

pub fn layout_from_str(s: &str) -> Result<SystemLayout, IoError> {
    Ok(serde_json::from_str(s)?)
}
