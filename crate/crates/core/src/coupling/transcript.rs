use serde::{Deserialize, Serialize};

use crate::graph::{EdgePair, SimpleGraph};
use crate::oracle::RegularCount;
use crate::tape::TapeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    /// Weighted deletion from `K_n` down to a `d`-regular graph.
    UpperDeletion,
    /// Deletion with schedule thresholds, producing the binomial side.
    UpperComparison,
    /// First-appearance deletion sequences used only for analysis.
    UpperReference,
    /// Weighted addition from the empty graph up to a `d`-regular graph.
    LowerAddition,
    /// First-appearance addition sequence of the lower coupling.
    LowerReference,
}

/// The acceptance threshold a draw was compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// `num / den`, compared exactly.
    Ratio { num: RegularCount, den: RegularCount },
    Real(f64),
}

impl Threshold {
    pub fn as_f64(&self) -> f64 {
        match self {
            Threshold::Ratio { num, den } => ratio_f64(&num.0, &den.0),
            Threshold::Real(t) => *t,
        }
    }
}

pub(crate) fn ratio_f64(num: &num_bigint::BigUint, den: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let r = num_rational::BigRational::new(num.clone().into(), den.clone().into());
    r.to_f64().unwrap_or(f64::NAN)
}

/// One stage of a process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    /// `i`, 1-based.
    pub stage: usize,
    /// Tape position consumed by this stage.
    pub tape_index: usize,
    pub edge: EdgePair,
    pub threshold: Threshold,
    /// Whether the stage changed the graph. Always true for the main
    /// processes; reference sequences may skip.
    pub acted: bool,
    /// Eligible draws rejected since the previous stage.
    pub rejected: usize,
    /// Smallest acceptance ratio over all eligible edges at this stage.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratio_floor: Option<f64>,
    /// Number of eligible edges attaining the maximum weight.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub argmax_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessTranscript {
    pub kind: ProcessKind,
    pub tape: TapeId,
    pub stages: Vec<StageRecord>,
}

impl ProcessTranscript {
    pub fn new(kind: ProcessKind, tape: TapeId) -> Self {
        Self { kind, tape, stages: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// `index(1), index(2), ...` as a 0-based vector.
    pub fn tape_indices(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.tape_index).collect()
    }

    /// Graph after the first `stages` stages, starting from `start`.
    /// Deletion kinds remove edges, addition kinds add them.
    pub fn replay(&self, start: &SimpleGraph, stages: usize) -> SimpleGraph {
        let mut g = start.clone();
        let adds = matches!(self.kind, ProcessKind::LowerAddition | ProcessKind::LowerReference);
        for s in self.stages.iter().take(stages).filter(|s| s.acted) {
            if adds {
                g.add_edge(s.edge).expect("edge in range");
            } else {
                g.remove_edge(s.edge).expect("edge in range");
            }
        }
        g
    }

    /// Strictly increasing tape indices and no repeated acted-on edge.
    pub fn is_well_formed(&self) -> bool {
        let increasing = self.stages.windows(2).all(|w| w[0].tape_index < w[1].tape_index);
        let mut seen = std::collections::HashSet::new();
        let distinct = self.stages.iter().filter(|s| s.acted).all(|s| seen.insert(s.edge));
        increasing && distinct && self.stages.iter().enumerate().all(|(i, s)| s.stage == i + 1)
    }
}
