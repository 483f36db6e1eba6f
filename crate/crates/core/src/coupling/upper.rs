//! Upper coupling: a random `d`-regular graph `G` inside a binomial graph `G*`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::oracle::Oracle;
use crate::params::{EtaSchedule, ModelParams};
use crate::tape::RandomnessTape;

use super::transcript::{ProcessKind, ProcessTranscript, StageRecord, Threshold};
use super::weighted::{run_weighted, Backend, DeletionWeights};

/// Sub-stream carrying the binomial edge count of the upper coupling.
pub const UPPER_COUNT_STREAM: &str = "M";

/// Runs the weighted deletion process from `K_n` for `C(n,2) - dn/2` stages.
pub fn run_upper_deletion(
    params: &ModelParams,
    tape: &mut RandomnessTape,
    oracle: &Oracle,
    backend: Backend,
) -> Result<(ProcessTranscript, SimpleGraph)> {
    params.validate()?;
    let mut state = DeletionWeights::new(SimpleGraph::complete(params.n), params.d, backend, oracle)?;
    let t = run_weighted(ProcessKind::UpperDeletion, tape, params.non_edges(), &mut state)?;
    let g = t.replay(&SimpleGraph::complete(params.n), t.len());
    Ok((t, g))
}

/// Outcome of running the comparison process for a number of stages.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRun {
    pub transcript: ProcessTranscript,
    pub graph: SimpleGraph,
    /// First stage whose threshold was not positive, if the run stopped there.
    pub stalled_at: Option<usize>,
}

/// The comparison process for up to `stages` stages. With `tolerate_stall`,
/// a non-positive threshold ends the run early instead of failing.
pub fn comparison_sequence(
    params: &ModelParams,
    tape: &mut RandomnessTape,
    stages: usize,
    tolerate_stall: bool,
) -> Result<ComparisonRun> {
    params.validate()?;
    let n = params.n;
    let schedule = params.schedule();
    let mut g = SimpleGraph::complete(n);
    let mut transcript = ProcessTranscript::new(ProcessKind::UpperComparison, tape.id());
    let mut idx = 0;
    let stages = stages.min(params.pairs());
    for stage in 1..=stages {
        let thr = schedule.upper_threshold(stage);
        if thr <= 0.0 {
            if tolerate_stall {
                return Ok(ComparisonRun { transcript, graph: g, stalled_at: Some(stage) });
            }
            return Err(Error::StalledThreshold { stage, value: thr });
        }
        let mut rejected = 0;
        loop {
            idx += 1;
            let e = tape.edge(idx)?;
            if !g.has_edge(e) {
                continue;
            }
            if tape.unit(idx)?.le(thr) {
                transcript.stages.push(StageRecord {
                    stage,
                    tape_index: idx,
                    edge: e,
                    threshold: Threshold::Real(thr),
                    acted: true,
                    rejected,
                    ratio_floor: None,
                    argmax_size: None,
                });
                g.remove_edge(e)?;
                break;
            }
            rejected += 1;
        }
    }
    Ok(ComparisonRun { transcript, graph: g, stalled_at: None })
}

/// Draws `M ~ Bin(C(n,2), (1+ε)d/n)` and runs the comparison process for
/// `C(n,2) - M` stages, giving `G*`.
pub fn run_gstar(params: &ModelParams, tape: &mut RandomnessTape) -> Result<(ComparisonRun, u64)> {
    let m = draw_upper_count(params, tape)?;
    let run = comparison_sequence(params, tape, params.pairs() - m as usize, false)?;
    Ok((run, m))
}

pub fn draw_upper_count(params: &ModelParams, tape: &RandomnessTape) -> Result<u64> {
    tape.binomial(UPPER_COUNT_STREAM, params.pairs() as u64, params.p_upper())
}

/// The first-appearance sequence `H` and its thinned variant `G⁺`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpperReference {
    /// `k(1), k(2), ...`, as a 0-based vector.
    pub first_appearance: Vec<usize>,
    /// Whether `G⁺` deleted `e_{k(i)}` at step `i`.
    pub thinned_deleted: Vec<bool>,
    /// `N = C(n,2) - dn/2 - 2R`.
    pub steps: usize,
    /// `e(H_N)`.
    pub reference_edges: usize,
    /// `e(G⁺_N)`.
    pub thinned_edges: usize,
    /// `e(G⁺_N) <= e(H_N) + R`.
    pub budget_holds: bool,
    pub transcript: ProcessTranscript,
}

/// Builds `k(i)` for `1 <= i <= len` and the `G⁺` decisions. `G⁺_i` deletes
/// `e_{k(i)}` when `x_{k(i)}` passes the stage-`i` comparison threshold.
pub fn run_upper_reference(params: &ModelParams, tape: &mut RandomnessTape, len: usize) -> Result<UpperReference> {
    params.validate()?;
    let n = params.n;
    let schedule = params.schedule();
    let len = len.min(params.pairs());
    let mut seen = vec![false; params.pairs()];
    let mut transcript = ProcessTranscript::new(ProcessKind::UpperReference, tape.id());
    let mut idx = 0;
    let mut k = Vec::with_capacity(len);
    let mut deleted = Vec::with_capacity(len);
    for i in 1..=len {
        let e = loop {
            idx += 1;
            let e = tape.edge(idx)?;
            if !seen[e.index(n)] {
                seen[e.index(n)] = true;
                break e;
            }
        };
        let thr = schedule.upper_threshold(i);
        let acted = tape.unit(idx)?.le(thr);
        k.push(idx);
        deleted.push(acted);
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
    let steps = params.upper_steps().min(len);
    let reference_edges = params.pairs() - steps;
    let thinned_edges = params.pairs() - deleted[..steps].iter().filter(|&&b| b).count();
    Ok(UpperReference {
        first_appearance: k,
        thinned_deleted: deleted,
        steps,
        reference_edges,
        thinned_edges,
        budget_holds: thinned_edges <= reference_edges + params.slack(),
        transcript,
    })
}

/// One trial of the upper coupling, with everything needed to audit it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpperCoupling {
    pub params: ModelParams,
    pub trial: u64,
    pub regular: SimpleGraph,
    pub binomial: SimpleGraph,
    pub binomial_edges: u64,
    pub contained: bool,
    pub regular_transcript: ProcessTranscript,
    /// The comparison process run far enough for the interleaving checks;
    /// `G*` is its state after `C(n,2) - M` stages.
    pub comparison: ComparisonRun,
    pub reference: UpperReference,
}

/// Runs `G`, `G*` and the reference sequences on one shared tape.
pub fn run_coupled_upper(
    params: &ModelParams,
    master_seed: u64,
    trial: u64,
    oracle: &Oracle,
    backend: Backend,
) -> Result<UpperCoupling> {
    params.validate()?;
    let mut tape = RandomnessTape::for_trial(params.n, master_seed, trial);
    let (regular_transcript, regular) = run_upper_deletion(params, &mut tape, oracle, backend)?;
    let m = draw_upper_count(params, &tape)?;
    let needed = params.pairs() - m as usize;
    let horizon = needed.max(params.upper_steps());
    let comparison = comparison_sequence(params, &mut tape, horizon, true)?;
    if let Some(stage) = comparison.stalled_at {
        if stage <= needed {
            let value = params.schedule().upper_threshold(stage);
            return Err(Error::StalledThreshold { stage, value });
        }
    }
    let binomial = comparison.transcript.replay(&SimpleGraph::complete(params.n), needed);
    let reference = run_upper_reference(params, &mut tape, params.pairs())?;
    Ok(UpperCoupling {
        params: params.clone(),
        trial,
        contained: regular.is_subgraph_of(&binomial),
        regular,
        binomial,
        binomial_edges: m,
        regular_transcript,
        comparison,
        reference,
    })
}

/// Tally of one deterministic claim over the indices where its hypotheses hold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimTally {
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<usize>,
}

impl ClaimTally {
    fn record(&mut self, i: usize, ok: bool) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            self.first_violation.get_or_insert(i);
        }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterleavingReport {
    /// `k(i) <= ℓ(i)` and `k(i) <= m(i)`.
    pub first_appearance: ClaimTally,
    /// `e(G⁺_N) <= e(H_N) + R`.
    pub budget_holds: bool,
    /// `m(i) <= k(i+R)` for `i <= N - R`, checked when the budget holds.
    pub comparison_lag: ClaimTally,
    /// Every acceptance ratio of `G` at stage `i` is at least
    /// `1 - η_{i-1}(dn/2)/(C(n,2) - dn/2 - i + 1)`, for `i <= C(n,2) - dn/2 - R`.
    pub ratio_floor_holds: bool,
    /// Last stage up to which the ratio floor held throughout.
    pub ratio_floor_prefix: usize,
    /// `F_{i+R} ⊆ G*_i` whenever the ratio floor held up to stage `i+R` and
    /// `m(j) <= ℓ(j+R)` for all `j <= i`.
    pub containment_chain: ClaimTally,
    /// The hypotheses that force `G ⊆ G*` hold for this trial.
    pub containment_forced: bool,
    pub contained: bool,
    pub pass: bool,
}

/// Checks the deterministic relations between the tape indices of the three
/// processes in `run`.
pub fn verify_transcript_interleaving(run: &UpperCoupling) -> Result<InterleavingReport> {
    let p = &run.params;
    let tape = run.regular_transcript.tape;
    if run.comparison.transcript.tape != tape || run.reference.transcript.tape != tape {
        return Err(Error::TapeMismatch);
    }
    let ell = run.regular_transcript.tape_indices();
    let m = run.comparison.transcript.tape_indices();
    let k = &run.reference.first_appearance;
    let r = p.slack();
    let big_n = p.upper_steps();

    let mut first = ClaimTally::default();
    for i in 1..=p.non_edges().min(k.len()) {
        let ok = ell.get(i - 1).is_none_or(|&l| k[i - 1] <= l) && m.get(i - 1).is_none_or(|&x| k[i - 1] <= x);
        first.record(i, ok);
    }

    let mut lag = ClaimTally::default();
    if run.reference.budget_holds {
        for i in 1..=big_n.saturating_sub(r) {
            if let (Some(&mi), Some(&ki)) = (m.get(i - 1), k.get(i + r - 1)) {
                lag.record(i, mi <= ki);
            }
        }
    }

    let schedule: EtaSchedule = p.schedule();
    let floor_limit = p.non_edges().saturating_sub(r);
    let mut prefix = 0;
    for s in &run.regular_transcript.stages {
        if s.stage > floor_limit {
            break;
        }
        let floor = s.ratio_floor.ok_or_else(|| Error::Precondition("transcript lacks ratio floors".into()))?;
        if floor < schedule.ratio_floor(s.stage) {
            break;
        }
        prefix = s.stage;
    }
    let floor_holds = prefix >= floor_limit.min(run.regular_transcript.len());

    let mut chain = ClaimTally::default();
    let mut chain_reach = 0;
    let start = SimpleGraph::complete(p.n);
    let mut f = start.clone();
    let mut gs = start.clone();
    let mut f_stage = 0;
    for i in 1..=m.len() {
        // Hypotheses are cumulative in i: once one fails, later i are vacuous.
        if i + r > prefix || i + r > ell.len() || m[i - 1] > ell[i + r - 1] {
            break;
        }
        gs.remove_edge(run.comparison.transcript.stages[i - 1].edge)?;
        while f_stage < i + r {
            f.remove_edge(run.regular_transcript.stages[f_stage].edge)?;
            f_stage += 1;
        }
        chain.record(i, f.is_subgraph_of(&gs));
        chain_reach = i;
    }

    // F_{C-M+R} ⊆ G*_{C-M} together with G ⊆ F_{C-M+R} forces G ⊆ G*.
    let needed = p.pairs() - run.binomial_edges as usize;
    let containment_forced = chain.holds() && needed >= 1 && chain_reach >= needed;
    let pass = first.holds() && lag.holds() && chain.holds() && (!containment_forced || run.contained);
    Ok(InterleavingReport {
        first_appearance: first,
        budget_holds: run.reference.budget_holds,
        comparison_lag: lag,
        ratio_floor_holds: floor_holds,
        ratio_floor_prefix: prefix,
        containment_chain: chain,
        containment_forced,
        contained: run.contained,
        pass,
    })
}
