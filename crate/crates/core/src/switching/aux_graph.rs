//! Bipartite switching graphs between two families of regular graphs, built
//! independently from each side so that the double count is a real check.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgePair, GraphKey, SimpleGraph, VertexSet};
use crate::oracle::{enumerate_extensions, enumerate_regular, OracleConfig};

use super::moves::{
    double_edge_switches, single_edge_switches, six_cycle_moves_within, six_cycle_statistic, ten_cycle_switches,
    SixCycleMode, SwitchRule,
};

#[derive(Debug, Clone)]
pub struct SwitchingGraph {
    pub d: usize,
    pub rule: SwitchRule,
    pub left: Vec<SimpleGraph>,
    pub right: Vec<SimpleGraph>,
    /// `(left index, right index)`, as produced by the left-side enumerator.
    pub edges: Vec<(usize, usize)>,
    /// Degrees recorded by the left-side enumerator.
    pub left_degrees: Vec<usize>,
    /// Degrees recorded by the right-side (reverse) enumerator.
    pub right_degrees: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCountReport {
    pub left_size: usize,
    pub right_size: usize,
    pub left_sum: usize,
    pub right_sum: usize,
    pub edge_count: usize,
    pub min_left_degree: usize,
    pub max_left_degree: usize,
    pub min_right_degree: usize,
    pub max_right_degree: usize,
    /// Every edge re-derives as a switch from its two endpoint graphs.
    pub edges_valid: bool,
    /// Degrees implied by the edge list match both recorded degree vectors.
    pub degrees_consistent: bool,
    pub pass: bool,
}

pub fn verify_double_count(g: &SwitchingGraph) -> DoubleCountReport {
    let mut from_edges_l = vec![0usize; g.left.len()];
    let mut from_edges_r = vec![0usize; g.right.len()];
    let mut edges_valid = true;
    for &(i, j) in &g.edges {
        match (g.left.get(i), g.right.get(j)) {
            (Some(a), Some(b)) => {
                from_edges_l[i] += 1;
                from_edges_r[j] += 1;
                edges_valid &= g.rule.relates(a, b, g.d);
            }
            _ => edges_valid = false,
        }
    }
    let left_sum: usize = g.left_degrees.iter().sum();
    let right_sum: usize = g.right_degrees.iter().sum();
    let degrees_consistent = from_edges_l == g.left_degrees && from_edges_r == g.right_degrees;
    let min_max = |v: &[usize]| (v.iter().copied().min().unwrap_or(0), v.iter().copied().max().unwrap_or(0));
    let (min_left_degree, max_left_degree) = min_max(&g.left_degrees);
    let (min_right_degree, max_right_degree) = min_max(&g.right_degrees);
    let edge_count = g.edges.len();
    DoubleCountReport {
        left_size: g.left.len(),
        right_size: g.right.len(),
        left_sum,
        right_sum,
        edge_count,
        min_left_degree,
        max_left_degree,
        min_right_degree,
        max_right_degree,
        edges_valid,
        degrees_consistent,
        pass: left_sum == right_sum && left_sum == edge_count && edges_valid && degrees_consistent,
    }
}

fn index_of(graphs: &[SimpleGraph]) -> HashMap<GraphKey, usize> {
    graphs.iter().enumerate().map(|(i, g)| (g.canonical_key(), i)).collect()
}

/// Assembles the graph from a forward enumerator (left → right) and a reverse
/// one (right → left).
fn assemble(
    d: usize,
    rule: SwitchRule,
    left: Vec<SimpleGraph>,
    right: Vec<SimpleGraph>,
    forward: impl Fn(&SimpleGraph) -> Result<Vec<SimpleGraph>>,
    reverse: impl Fn(&SimpleGraph) -> Result<Vec<SimpleGraph>>,
) -> Result<SwitchingGraph> {
    let right_index = index_of(&right);
    let left_index = index_of(&left);
    let mut edges = Vec::new();
    let mut left_degrees = Vec::with_capacity(left.len());
    for (i, k) in left.iter().enumerate() {
        let next = forward(k)?;
        for k2 in &next {
            let j = *right_index
                .get(&k2.canonical_key())
                .ok_or_else(|| Error::Precondition(format!("switch from {k} left the family: {k2}")))?;
            edges.push((i, j));
        }
        left_degrees.push(next.len());
    }
    let mut right_degrees = Vec::with_capacity(right.len());
    for k2 in &right {
        let back = reverse(k2)?;
        if let Some(stray) = back.iter().find(|k| !left_index.contains_key(&k.canonical_key())) {
            return Err(Error::Precondition(format!("reverse switch from {k2} left the family: {stray}")));
        }
        right_degrees.push(back.len());
    }
    Ok(SwitchingGraph { d, rule, left, right, edges, left_degrees, right_degrees })
}

/// Between `{K ∈ K_d(F) : e ∈ K}` and `{K ∈ K_d(F) : e ∉ K}`.
pub fn build_single_edge(f: &SimpleGraph, d: usize, e: EdgePair, ell: usize, cfg: &OracleConfig) -> Result<SwitchingGraph> {
    f.check_edge(e)?;
    let all = enumerate_regular(f, d, cfg)?;
    let (left, right): (Vec<_>, Vec<_>) = all.into_iter().partition(|k| k.has_edge(e));
    let rule = SwitchRule::SingleEdge { f: f.clone(), e, ell };
    assemble(
        d,
        rule,
        left,
        right,
        |k| single_edge_switches(f, d, k, e, ell),
        |k| single_edge_switches(f, d, k, e, ell),
    )
}

/// Between `{K ∈ K_d(F) : e ∈ K, g ∉ K}` and `{K ∈ K_d(F) : g ∈ K, e ∉ K}`.
pub fn build_double_edge(
    f: &SimpleGraph,
    d: usize,
    e: EdgePair,
    g: EdgePair,
    ell: usize,
    cfg: &OracleConfig,
) -> Result<SwitchingGraph> {
    f.check_edge(e)?;
    f.check_edge(g)?;
    let all = enumerate_regular(f, d, cfg)?;
    let left: Vec<_> = all.iter().filter(|k| k.has_edge(e) && !k.has_edge(g)).cloned().collect();
    let right: Vec<_> = all.iter().filter(|k| k.has_edge(g) && !k.has_edge(e)).cloned().collect();
    let rule = SwitchRule::DoubleEdge { f: f.clone(), e, g, ell };
    assemble(
        d,
        rule,
        left,
        right,
        |k| double_edge_switches(f, d, k, e, g, ell),
        |k| double_edge_switches(f, d, k, g, e, ell),
    )
}

/// Between `{K ⊇ F + e : g ∉ K}` and `{K ⊇ F + g : e ∉ K}`.
pub fn build_ten_cycle(f: &SimpleGraph, d: usize, e: EdgePair, g: EdgePair, cfg: &OracleConfig) -> Result<SwitchingGraph> {
    f.check_edge(e)?;
    f.check_edge(g)?;
    let all = enumerate_extensions(f, d, cfg)?;
    let left: Vec<_> = all.iter().filter(|k| k.has_edge(e) && !k.has_edge(g)).cloned().collect();
    let right: Vec<_> = all.iter().filter(|k| k.has_edge(g) && !k.has_edge(e)).cloned().collect();
    let rule = SwitchRule::TenCycle { f: f.clone(), e, g };
    assemble(d, rule, left, right, |k| ten_cycle_switches(f, d, k, e, g), |k| ten_cycle_switches(f, d, k, g, e))
}

/// Between the members of `family` with statistic `level` and those with
/// statistic `level - 1`, switching inside the host `f`. `family` should be
/// all of `K_d(F)`; a switch landing outside it is an error.
pub fn build_six_cycle(
    f: &SimpleGraph,
    family: &[SimpleGraph],
    d: usize,
    w: &VertexSet,
    mode: SixCycleMode,
    level: i64,
) -> Result<SwitchingGraph> {
    let stat = |k: &SimpleGraph| six_cycle_statistic(k, w, mode);
    let left: Vec<_> = family.iter().filter(|k| stat(k) == level).cloned().collect();
    let right: Vec<_> = family.iter().filter(|k| stat(k) == level - 1).cloned().collect();
    let moves = |k: &SimpleGraph, want: i64| -> Result<Vec<SimpleGraph>> {
        Ok(six_cycle_moves_within(f, k, w, mode)?.into_iter().filter(|(_, dl)| *dl == want).map(|(g, _)| g).collect())
    };
    let rule = SwitchRule::SixCycle { f: f.clone(), w: w.clone(), mode };
    assemble(d, rule, left, right, |k| moves(k, -1), |k| moves(k, 1))
}
