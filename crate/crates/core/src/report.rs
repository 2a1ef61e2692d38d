//! Verdicts produced by the condition checkers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::VertexId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConditionId {
    C1,
    C2,
    C3,
    C4,
    C5,
    /// Local `(λ, c)`-quasiconvexity probe (a hypothesis, not one of the five conditions).
    #[serde(rename = "LQC")]
    LocalQuasiconvexity,
    /// Quasisymmetric transfer of the John property.
    #[serde(rename = "QS")]
    Transfer,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionId::C1 => "C1",
            ConditionId::C2 => "C2",
            ConditionId::C3 => "C3",
            ConditionId::C4 => "C4",
            ConditionId::C5 => "C5",
            ConditionId::LocalQuasiconvexity => "LQC",
            ConditionId::Transfer => "QS",
        };
        f.write_str(s)
    }
}

/// A point of a space referenced by vertex id, position, or both.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<VertexId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Point>,
}

/// Where a report's worst margin was attained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Index of the offending curve in the checked family, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<usize>,
    pub basepoint: NodeRef,
    pub point: NodeRef,
}

/// Verdict for one condition: `pass` holds exactly when `worst_margin >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub constants: BTreeMap<String, f64>,
    pub pass: bool,
    pub worst_margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl ConditionReport {
    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }
}

/// Accumulates margins and keeps the smallest one with its witness.
#[derive(Clone, Debug)]
pub(crate) struct MarginTracker {
    worst: f64,
    witness: Option<Witness>,
}

impl MarginTracker {
    pub fn new() -> Self {
        MarginTracker { worst: f64::INFINITY, witness: None }
    }

    pub fn observe(&mut self, margin: f64, witness: Witness) {
        // NaN margins count as failures
        let margin = if margin.is_nan() { f64::MIN } else { margin };
        if margin < self.worst {
            self.worst = margin;
            self.witness = Some(witness);
        }
    }

    pub fn merge(&mut self, other: MarginTracker) {
        if let Some(w) = other.witness {
            self.observe(other.worst, w);
        }
    }

    pub fn finish(self, condition: ConditionId, constants: BTreeMap<String, f64>) -> ConditionReport {
        // an empty family passes vacuously
        let worst = if self.worst.is_finite() {
            self.worst
        } else if self.worst > 0.0 {
            0.0
        } else {
            f64::MIN
        };
        ConditionReport {
            condition,
            constants,
            pass: worst >= 0.0,
            worst_margin: worst,
            witness: self.witness,
        }
    }
}

pub(crate) fn constants<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
