//! Lower coupling: a binomial graph `G_*` inside a random `d`-regular graph `G`.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{EdgePair, SimpleGraph};
use crate::oracle::Oracle;
use crate::params::ModelParams;
use crate::tape::RandomnessTape;

use super::transcript::{ProcessKind, ProcessTranscript, StageRecord, Threshold};
use super::weighted::{run_weighted, AdditionWeights, Backend};

pub const LOWER_COUNT_STREAM: &str = "M_lower";
pub const LOWER_SUBSET_STREAM: &str = "subset_lower";

/// Weighted addition from the empty graph for `dn/2` stages.
pub fn run_lower_addition(
    params: &ModelParams,
    tape: &mut RandomnessTape,
    oracle: &Oracle,
    backend: Backend,
) -> Result<(ProcessTranscript, SimpleGraph)> {
    params.validate()?;
    let empty = SimpleGraph::empty(params.n);
    let mut state = AdditionWeights::new(empty.clone(), params.d, backend, oracle)?;
    let t = run_weighted(ProcessKind::LowerAddition, tape, params.regular_edges(), &mut state)?;
    let g = t.replay(&empty, t.len());
    Ok((t, g))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowerReference {
    pub transcript: ProcessTranscript,
    /// `H_N` with `N = ⌊dn/2 - ηn⌋`.
    pub graph: SimpleGraph,
    pub steps: usize,
}

/// `H_i` adds the `i`-th first-appearing pair `e_{k(i)}` when `x_{k(i)} <= 1 - η`.
pub fn run_lower_reference(params: &ModelParams, tape: &mut RandomnessTape) -> Result<LowerReference> {
    params.validate()?;
    let n = params.n;
    let steps = params.lower_steps().min(params.pairs());
    let thr = 1.0 - params.eta;
    let mut seen = vec![false; params.pairs()];
    let mut transcript = ProcessTranscript::new(ProcessKind::LowerReference, tape.id());
    let mut idx = 0;
    for i in 1..=steps {
        let e = loop {
            idx += 1;
            let e = tape.edge(idx)?;
            if !seen[e.index(n)] {
                seen[e.index(n)] = true;
                break e;
            }
        };
        let acted = tape.unit(idx)?.le(thr);
        transcript.stages.push(StageRecord {
            stage: i,
            tape_index: idx,
            edge: e,
            threshold: Threshold::Real(thr),
            acted,
            rejected: 0,
            ratio_floor: None,
            argmax_size: None,
        });
    }
    let graph = transcript.replay(&SimpleGraph::empty(n), steps);
    Ok(LowerReference { transcript, graph, steps })
}

/// `G_*`: `M ~ Bin(C(n,2), (1-ε)d/n)` uniformly chosen edges of `H_N`, or of
/// all pairs when `H_N` has fewer than `M` edges.
pub fn run_gsub(params: &ModelParams, tape: &mut RandomnessTape) -> Result<(LowerReference, SimpleGraph, u64)> {
    let reference = run_lower_reference(params, tape)?;
    let m = tape.binomial(LOWER_COUNT_STREAM, params.pairs() as u64, params.p_lower())?;
    let pool: Vec<EdgePair> = if reference.graph.edge_count() >= m as usize {
        reference.graph.edges().collect()
    } else {
        SimpleGraph::complete(params.n).edges().collect()
    };
    let mut rng = tape.aux(LOWER_SUBSET_STREAM);
    let chosen = sample(&mut rng, pool.len(), m as usize);
    let g = SimpleGraph::from_pairs(params.n, chosen.iter().map(|i| pool[i]))?;
    Ok((reference, g, m))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowerCoupling {
    pub params: ModelParams,
    pub trial: u64,
    pub regular: SimpleGraph,
    pub binomial: SimpleGraph,
    pub binomial_edges: u64,
    pub contained: bool,
    /// `H_N ⊆ G`.
    pub reference_contained: bool,
    /// Every acceptance ratio of the first `N` stages was at least `1 - η`.
    pub ratio_floor_holds: bool,
    pub regular_transcript: ProcessTranscript,
    pub reference: LowerReference,
}

pub fn run_coupled_lower(
    params: &ModelParams,
    master_seed: u64,
    trial: u64,
    oracle: &Oracle,
    backend: Backend,
) -> Result<LowerCoupling> {
    params.validate()?;
    let mut tape = RandomnessTape::for_trial(params.n, master_seed, trial);
    let (regular_transcript, regular) = run_lower_addition(params, &mut tape, oracle, backend)?;
    let (reference, binomial, m) = run_gsub(params, &mut tape)?;
    let floor = 1.0 - params.eta;
    let ratio_floor_holds = regular_transcript
        .stages
        .iter()
        .take(reference.steps)
        .all(|s| s.ratio_floor.is_some_and(|r| r >= floor));
    Ok(LowerCoupling {
        params: params.clone(),
        trial,
        contained: binomial.is_subgraph_of(&regular),
        reference_contained: reference.graph.is_subgraph_of(&regular),
        ratio_floor_holds,
        regular,
        binomial,
        binomial_edges: m,
        regular_transcript,
        reference,
    })
}
