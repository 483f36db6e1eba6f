//! The two processes whose acceptance ratios come from regular-subgraph counts.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, EdgePair, SimpleGraph};
use crate::oracle::{Oracle, RegularCount, RegularFamily};
use crate::tape::RandomnessTape;

use super::transcript::{ratio_f64, ProcessKind, ProcessTranscript, StageRecord, Threshold};

/// How stage weights are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Explicit family with per-pair tallies when it is small enough, else DP.
    #[default]
    Auto,
    /// Explicit family of edge masks (`n <= 16`).
    Enumeration,
    /// Fresh DP count per candidate edge.
    DynamicProgram,
}

/// Families above this size are not materialised by [`Backend::Auto`].
pub const AUTO_FAMILY_LIMIT: u64 = 2_000_000;

fn use_family(backend: Backend, n: usize, d: usize, oracle: &Oracle) -> bool {
    match backend {
        Backend::Enumeration => true,
        Backend::DynamicProgram => false,
        Backend::Auto => {
            pair_count(n) <= 128
                && n <= oracle.config().max_vertices
                && oracle
                    .count_regular(&SimpleGraph::complete(n), d)
                    .to_u64()
                    .is_some_and(|c| c <= AUTO_FAMILY_LIMIT)
        }
    }
}

pub(crate) trait StageWeights {
    fn eligible(&self, e: EdgePair) -> bool;
    /// Weight of every eligible pair, in canonical order.
    fn weights(&self) -> Vec<(EdgePair, BigUint)>;
    fn apply(&mut self, e: EdgePair);
}

/// Deletion from a host: weight of `e` is `|K_d(F - e)|`.
pub(crate) struct DeletionWeights<'a> {
    host: SimpleGraph,
    d: usize,
    family: Option<RegularFamily>,
    oracle: &'a Oracle,
}

impl<'a> DeletionWeights<'a> {
    pub(crate) fn new(host: SimpleGraph, d: usize, backend: Backend, oracle: &'a Oracle) -> Result<Self> {
        let family = if use_family(backend, host.order(), d, oracle) {
            let base = oracle.complete_family(host.order(), d)?;
            let mut fam = (*base).clone();
            for e in SimpleGraph::complete(host.order()).difference(&host)?.edges() {
                fam.forbid(e);
            }
            Some(fam)
        } else {
            None
        };
        Ok(Self { host, d, family, oracle })
    }
}

impl StageWeights for DeletionWeights<'_> {
    fn eligible(&self, e: EdgePair) -> bool {
        self.host.has_edge(e)
    }

    fn weights(&self) -> Vec<(EdgePair, BigUint)> {
        self.host
            .edges()
            .map(|e| {
                let w = match &self.family {
                    Some(f) => BigUint::from(f.avoiding(e)),
                    None => {
                        self.oracle.count_regular(&self.host.without_edge(e).expect("in range"), self.d).0
                    }
                };
                (e, w)
            })
            .collect()
    }

    fn apply(&mut self, e: EdgePair) {
        self.host.remove_edge(e).expect("in range");
        if let Some(f) = &mut self.family {
            f.forbid(e);
        }
    }
}

/// Addition towards a regular graph: weight of a non-edge `e` is
/// `|{K ∈ K_d(n) : F + e ⊆ K}|`.
pub(crate) struct AdditionWeights<'a> {
    current: SimpleGraph,
    d: usize,
    family: Option<RegularFamily>,
    oracle: &'a Oracle,
}

impl<'a> AdditionWeights<'a> {
    pub(crate) fn new(start: SimpleGraph, d: usize, backend: Backend, oracle: &'a Oracle) -> Result<Self> {
        let family = if use_family(backend, start.order(), d, oracle) {
            let base = oracle.complete_family(start.order(), d)?;
            let mut fam = (*base).clone();
            for e in start.edges() {
                fam.require(e);
            }
            Some(fam)
        } else {
            None
        };
        Ok(Self { current: start, d, family, oracle })
    }
}

impl StageWeights for AdditionWeights<'_> {
    fn eligible(&self, e: EdgePair) -> bool {
        !self.current.has_edge(e)
    }

    fn weights(&self) -> Vec<(EdgePair, BigUint)> {
        self.current
            .complement()
            .edges()
            .map(|e| {
                let w = match &self.family {
                    Some(f) => BigUint::from(f.containing(e)),
                    None => {
                        self.oracle.count_extensions(&self.current.with_edge(e).expect("in range"), self.d).0
                    }
                };
                (e, w)
            })
            .collect()
    }

    fn apply(&mut self, e: EdgePair) {
        self.current.add_edge(e).expect("in range");
        if let Some(f) = &mut self.family {
            f.require(e);
        }
    }
}

/// Runs `stages` stages: at each, scan the tape for the next eligible pair
/// `e_j` with `x_j <= w(e_j) / max w`.
pub(crate) fn run_weighted(
    kind: ProcessKind,
    tape: &mut RandomnessTape,
    stages: usize,
    state: &mut dyn StageWeights,
) -> Result<ProcessTranscript> {
    let n = tape.id().n;
    let mut transcript = ProcessTranscript::new(kind, tape.id());
    let mut idx = 0usize;
    for stage in 1..=stages {
        let weights = state.weights();
        let max = weights.iter().map(|(_, w)| w).max().cloned().unwrap_or_default();
        if max.is_zero() {
            return Err(Error::DeadEnd { stage, reason: "every eligible pair has weight zero".into() });
        }
        let min = weights.iter().map(|(_, w)| w).min().cloned().unwrap_or_default();
        let argmax_size = weights.iter().filter(|(_, w)| *w == max).count();
        let mut table: Vec<Option<BigUint>> = vec![None; pair_count(n)];
        for (e, w) in weights {
            table[e.index(n)] = Some(w);
        }
        let mut rejected = 0;
        loop {
            idx += 1;
            let e = tape.edge(idx)?;
            let Some(w) = &table[e.index(n)] else { continue };
            debug_assert!(state.eligible(e));
            if tape.unit(idx)?.le_big_fraction(w, &max) {
                transcript.stages.push(StageRecord {
                    stage,
                    tape_index: idx,
                    edge: e,
                    threshold: Threshold::Ratio { num: RegularCount(w.clone()), den: RegularCount(max.clone()) },
                    acted: true,
                    rejected,
                    ratio_floor: Some(ratio_f64(&min, &max)),
                    argmax_size: Some(argmax_size),
                });
                state.apply(e);
                break;
            }
            rejected += 1;
        }
    }
    Ok(transcript)
}
