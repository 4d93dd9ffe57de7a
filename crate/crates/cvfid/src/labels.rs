//! Variable labels for hybrid quantum/classical phase-space states.
//!
//! Every state variable is either a quantum quadrature or a classical
//! stochastic parameter. Quantum variables come in conjugate (x, p) pairs;
//! classical variables are grouped in pairs too (x_cl, p_cl) but carry no
//! commutator and hence no Heisenberg constraint.

use crate::error::{CvfidError, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VariableKind {
    Quantum,
    Classical,
}

/// Which member of a conjugate pair a variable is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairRole {
    PositionLike,
    MomentumLike,
}

/// A named phase-space variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableLabel {
    pub name: String,
    pub kind: VariableKind,
    /// Index of the conjugate pair this variable belongs to.
    pub pair_index: usize,
    pub role: PairRole,
}

impl VariableLabel {
    pub fn new(name: impl Into<String>, kind: VariableKind, pair_index: usize, role: PairRole) -> Self {
        VariableLabel {
            name: name.into(),
            kind,
            pair_index,
            role,
        }
    }

    pub fn is_quantum(&self) -> bool {
        self.kind == VariableKind::Quantum
    }
}

/// Builds the conjugate pair (`x_name`, `p_name`) with a common pair index.
pub fn pair(
    x_name: impl Into<String>,
    p_name: impl Into<String>,
    kind: VariableKind,
    pair_index: usize,
) -> [VariableLabel; 2] {
    [
        VariableLabel::new(x_name, kind, pair_index, PairRole::PositionLike),
        VariableLabel::new(p_name, kind, pair_index, PairRole::MomentumLike),
    ]
}

/// Validates a label list: unique names, and every quantum variable paired
/// with exactly one conjugate of the opposite role.
pub fn validate_labels(labels: &[VariableLabel]) -> Result<()> {
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[..i] {
            if a.name == b.name {
                return Err(CvfidError::DuplicateLabel(a.name.clone()));
            }
        }
    }
    for l in labels.iter().filter(|l| l.is_quantum()) {
        let partners = labels
            .iter()
            .filter(|m| m.is_quantum() && m.pair_index == l.pair_index && m.role != l.role)
            .count();
        let same_role = labels
            .iter()
            .filter(|m| m.is_quantum() && m.pair_index == l.pair_index && m.role == l.role)
            .count();
        if partners != 1 || same_role != 1 {
            return Err(CvfidError::UnpairedQuantum(l.name.clone()));
        }
    }
    Ok(())
}

/// Index of the label named `name`.
pub fn index_of(labels: &[VariableLabel], name: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l.name == name)
        .ok_or_else(|| CvfidError::UnknownLabel(name.to_string()))
}

/// Index of the conjugate partner of the variable at `idx`, if any.
pub fn conjugate_of(labels: &[VariableLabel], idx: usize) -> Option<usize> {
    let l = &labels[idx];
    labels
        .iter()
        .position(|m| m.pair_index == l.pair_index && m.kind == l.kind && m.role != l.role)
}
