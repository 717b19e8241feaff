//! Labeled composite-system layouts.

use serde::{Deserialize, Serialize};

use super::NetError;

/// Wire direction relative to the network: `In` is received, `Out` is emitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    In,
    Out,
}

/// One labeled system wire.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub label: String,
    pub dim: usize,
    pub role: Role,
    pub step: usize,
}

impl SystemInfo {
    pub fn new(label: impl Into<String>, dim: usize, role: Role, step: usize) -> Self {
        Self { label: label.into(), dim, role, step }
    }
}

/// Ordered list of labeled systems; the first system is the most significant
/// Kronecker factor of the operators living on the layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemLayout {
    systems: Vec<SystemInfo>,
}

impl SystemLayout {
    /// Builds a layout, enforcing unique labels, nonzero dimensions and a
    /// contiguous step range `1..=N`.
    pub fn new(systems: Vec<SystemInfo>) -> Result<Self, NetError> {
        for (i, s) in systems.iter().enumerate() {
            if s.dim == 0 {
                return Err(NetError::BadLayout(format!("system '{}' has dimension 0", s.label)));
            }
            if s.step == 0 {
                return Err(NetError::BadLayout(format!("system '{}' has step 0 (steps start at 1)", s.label)));
            }
            if systems[..i].iter().any(|t| t.label == s.label) {
                return Err(NetError::BadLayout(format!("duplicate label '{}'", s.label)));
            }
        }
        let n_steps = systems.iter().map(|s| s.step).max().unwrap_or(0);
        for n in 1..=n_steps {
            if !systems.iter().any(|s| s.step == n) {
                return Err(NetError::BadLayout(format!("step {n} has no systems")));
            }
        }
        Ok(Self { systems })
    }

    /// Single-party comb layout with one in and one out wire per step, all of
    /// dimension `d`, labeled by `labels[2n] = in`, `labels[2n+1] = out`.
    pub fn chain(d: usize, labels: &[&str]) -> Result<Self, NetError> {
        if labels.len() % 2 != 0 || labels.is_empty() {
            return Err(NetError::BadLayout("chain needs an even, nonzero number of labels".into()));
        }
        let systems = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| SystemInfo::new(l, d, if i % 2 == 0 { Role::In } else { Role::Out }, i / 2 + 1))
            .collect();
        Self::new(systems)
    }

    pub fn systems(&self) -> &[SystemInfo] {
        &self.systems
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    /// Total Hilbert-space dimension (1 for an empty layout).
    pub fn dim(&self) -> usize {
        self.systems.iter().map(|s| s.dim).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.systems.iter().map(|s| s.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.systems.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn n_steps(&self) -> usize {
        self.systems.iter().map(|s| s.step).max().unwrap_or(0)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.systems.iter().position(|s| s.label == label)
    }

    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>, NetError> {
        labels
            .iter()
            .map(|&l| self.position(l).ok_or_else(|| NetError::UnknownLabel(l.to_string())))
            .collect()
    }

    /// Positions of the systems with the given role at the given step, in
    /// layout order.
    pub fn step_positions(&self, step: usize, role: Role) -> Vec<usize> {
        (0..self.systems.len())
            .filter(|&i| self.systems[i].step == step && self.systems[i].role == role)
            .collect()
    }

    /// Product of dimensions over a position set.
    pub fn dim_of(&self, positions: &[usize]) -> usize {
        positions.iter().map(|&i| self.systems[i].dim).product()
    }

    /// Sub-layout of the listed positions, preserving the given order.
    pub fn select(&self, positions: &[usize]) -> SystemLayout {
        SystemLayout { systems: positions.iter().map(|&i| self.systems[i].clone()).collect() }
    }

    /// Sub-layout with the listed positions removed.
    pub fn without(&self, removed: &[usize]) -> SystemLayout {
        SystemLayout {
            systems: (0..self.systems.len())
                .filter(|i| !removed.contains(i))
                .map(|i| self.systems[i].clone())
                .collect(),
        }
    }

    /// Concatenation; label sets must be disjoint.
    pub fn joined(&self, other: &SystemLayout) -> Result<SystemLayout, NetError> {
        let mut systems = self.systems.clone();
        systems.extend(other.systems.iter().cloned());
        SystemLayout::new(systems)
    }

    /// True when both layouts list the same labels with the same dimensions,
    /// in any order.
    pub fn same_label_set(&self, other: &SystemLayout) -> bool {
        self.systems.len() == other.systems.len()
            && self.systems.iter().all(|s| {
                other.position(&s.label).map(|i| other.systems[i].dim == s.dim).unwrap_or(false)
            })
    }
}
