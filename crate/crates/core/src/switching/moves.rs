//! Switch enumerators and validators. A switch replaces `K` by `K' = K △ D`
//! where `D` is an alternating structure (a cycle, or two paths closed by
//! `e` and `f`).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{EdgePair, GraphKey, SimpleGraph, Vertex, VertexSet};

use super::paths::{for_each_path, Layers};

fn path_edges(p: &[Vertex]) -> impl Iterator<Item = (usize, EdgePair)> + '_ {
    p.windows(2).enumerate().map(|(j, w)| (j + 1, EdgePair::of(w[0], w[1])))
}

/// Applies a path whose odd edges are added and even edges removed.
fn apply_path(k: &mut SimpleGraph, p: &[Vertex]) {
    for (j, e) in path_edges(p) {
        if j % 2 == 1 {
            k.add_edge(e).expect("in range");
        } else {
            k.remove_edge(e).expect("in range");
        }
    }
}

/// Applies a path whose odd edges are removed and even edges added.
fn apply_path_reversed(k: &mut SimpleGraph, p: &[Vertex]) {
    for (j, e) in path_edges(p) {
        if j % 2 == 1 {
            k.remove_edge(e).expect("in range");
        } else {
            k.add_edge(e).expect("in range");
        }
    }
}

fn check_pair(f: &SimpleGraph, k: &SimpleGraph, d: usize) -> Result<()> {
    if k.order() != f.order() {
        return Err(Error::SizeMismatch { left: f.order(), right: k.order() });
    }
    if !k.is_subgraph_of(f) {
        return Err(Error::Precondition("K must be a subgraph of F".into()));
    }
    if !k.is_regular(d) {
        return Err(Error::Precondition(format!("K must be {d}-regular")));
    }
    Ok(())
}

/// Switches through `e` along a cycle of length `2ℓ + 2` inside `F`.
///
/// With `e ∈ K` the cycle is `e` plus an alternating `u`–`v` path of length
/// `2ℓ + 1` that starts and ends in `F \ K`; the result avoids `e`. With
/// `e ∉ K` the path starts and ends in `K` and the result contains `e`.
pub fn single_edge_switches(f: &SimpleGraph, d: usize, k: &SimpleGraph, e: EdgePair, ell: usize) -> Result<Vec<SimpleGraph>> {
    check_pair(f, k, d)?;
    f.check_edge(e)?;
    if !f.has_edge(e) {
        return Err(Error::MissingEdge(e));
    }
    let diff = f.difference(k)?;
    let none = VertexSet::empty(f.order());
    let forward = k.has_edge(e);
    let layers = if forward { Layers::new(&diff, k) } else { Layers::new(k, &diff) };
    let mut out = Vec::new();
    for_each_path(layers, e.u(), Some(e.v()), 2 * ell + 1, &none, &mut |p| {
        let mut next = k.clone();
        if forward {
            next.remove_edge(e).expect("in range");
            apply_path(&mut next, p);
        } else {
            next.add_edge(e).expect("in range");
            apply_path_reversed(&mut next, p);
        }
        out.push(next);
    });
    out.sort();
    Ok(out)
}

/// Core of the two-path switchings: remove `drop = a1a2`, add `take = b1b2`,
/// and flip two vertex-disjoint alternating paths `a_i → b_{π(i)}` of length
/// `len` whose odd edges come from `add` and even edges from `remove`.
fn two_path_switches(
    k: &SimpleGraph,
    drop: EdgePair,
    take: EdgePair,
    len: usize,
    add: &SimpleGraph,
    remove: &SimpleGraph,
    both_pairings: bool,
) -> Vec<SimpleGraph> {
    let n = k.order();
    let (a1, a2) = (drop.u(), drop.v());
    let (b1, b2) = (take.u(), take.v());
    let layers = Layers::new(add, remove);
    let mut pairings = vec![(b1, b2)];
    if both_pairings {
        pairings.push((b2, b1));
    }
    let mut out = Vec::new();
    for (t1, t2) in pairings {
        let avoid1 = VertexSet::from_vertices(n, [a2, t2]).expect("in range");
        for_each_path(layers, a1, Some(t1), len, &avoid1, &mut |p1| {
            let mut avoid2 = VertexSet::from_vertices(n, p1.iter().copied()).expect("in range");
            avoid2.remove(a2);
            avoid2.remove(t2);
            for_each_path(layers, a2, Some(t2), len, &avoid2, &mut |p2| {
                if p2.iter().any(|v| p1.contains(v)) {
                    return;
                }
                let mut next = k.clone();
                next.remove_edge(drop).expect("in range");
                next.add_edge(take).expect("in range");
                apply_path(&mut next, p1);
                apply_path(&mut next, p2);
                out.push(next);
            });
        });
    }
    out.sort();
    out
}

/// Two-edge switchings inside `F`: from `K ∋ e` with `f ∉ K`, remove `e`, add
/// `f`, and flip vertex-disjoint alternating paths `u_1 → v_1`, `u_2 → v_2` of
/// length `2ℓ + 2` (first edge in `F \ K`, last in `K`). Endpoints are paired in
/// label order. Calling with the roles of `e` and `f` exchanged enumerates the
/// switches from the other side.
pub fn double_edge_switches(
    f: &SimpleGraph,
    d: usize,
    k: &SimpleGraph,
    e: EdgePair,
    g: EdgePair,
    ell: usize,
) -> Result<Vec<SimpleGraph>> {
    check_pair(f, k, d)?;
    f.check_edge(e)?;
    f.check_edge(g)?;
    if !e.is_disjoint(g) {
        return Err(Error::Precondition(format!("{e} and {g} must be vertex-disjoint")));
    }
    if !k.has_edge(e) {
        return Err(Error::MissingEdge(e));
    }
    if !f.has_edge(g) {
        return Err(Error::MissingEdge(g));
    }
    if k.has_edge(g) {
        return Err(Error::UnexpectedEdge(g));
    }
    let diff = f.difference(k)?;
    Ok(two_path_switches(k, e, g, 2 * ell + 2, &diff, k, false))
}

/// Ten-cycle switchings over the extensions of `F`: from `K ⊇ F + e` with
/// `f ∉ K`, remove `e`, add `f`, and flip two vertex-disjoint paths of length 4
/// joining the ends of `e` to the ends of `f` (either pairing), alternating
/// between non-edges of `K` and edges of `K \ F`.
pub fn ten_cycle_switches(f: &SimpleGraph, d: usize, k: &SimpleGraph, e: EdgePair, g: EdgePair) -> Result<Vec<SimpleGraph>> {
    if !f.is_subgraph_of(k) || !k.is_regular(d) {
        return Err(Error::Precondition("K must be a d-regular supergraph of F".into()));
    }
    f.check_edge(e)?;
    f.check_edge(g)?;
    if f.has_edge(e) || f.has_edge(g) {
        return Err(Error::Precondition("e and f must lie outside F".into()));
    }
    if !e.is_disjoint(g) {
        return Err(Error::Precondition(format!("{e} and {g} must be vertex-disjoint")));
    }
    if !k.has_edge(e) {
        return Err(Error::MissingEdge(e));
    }
    if k.has_edge(g) {
        return Err(Error::UnexpectedEdge(g));
    }
    let add = k.complement();
    let remove = k.difference(f)?;
    Ok(two_path_switches(k, e, g, 4, &add, &remove, true))
}

/// Which six-cycles count in the set-density switchings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SixCycleMode {
    /// Exactly two cycle vertices in `W'`; tracks `e(K[W'])`.
    TwoIn,
    /// Exactly one cycle vertex in `W'`; tracks
    /// `Σ_{v ∉ W'} max(d_K(v, W') - 1, 0)`.
    OneIn,
}

/// The statistic a six-cycle mode tracks.
pub fn six_cycle_statistic(k: &SimpleGraph, w: &VertexSet, mode: SixCycleMode) -> i64 {
    match mode {
        SixCycleMode::TwoIn => k.internal_edges(w) as i64,
        SixCycleMode::OneIn => (0..k.order())
            .filter(|&v| !w.contains(v))
            .map(|v| k.degree_into(v, w).saturating_sub(1) as i64)
            .sum(),
    }
}

/// Every distinct `K' = K △ C` for an alternating 6-cycle `C` (edges of `K`
/// alternating with non-edges) meeting `W'` in exactly the number of vertices
/// the mode asks for, paired with the change of the mode's statistic.
pub fn six_cycle_moves(k: &SimpleGraph, w: &VertexSet, mode: SixCycleMode) -> Vec<(SimpleGraph, i64)> {
    moves_in(k, &k.complement(), w, mode)
}

/// As [`six_cycle_moves`], but the added edges must lie in the host `f`, so
/// `K_d(F)` is closed under the moves. With `f = K_n` the two agree.
pub fn six_cycle_moves_within(
    f: &SimpleGraph,
    k: &SimpleGraph,
    w: &VertexSet,
    mode: SixCycleMode,
) -> Result<Vec<(SimpleGraph, i64)>> {
    if k.order() != f.order() {
        return Err(Error::SizeMismatch { left: f.order(), right: k.order() });
    }
    if !k.is_subgraph_of(f) {
        return Err(Error::Precondition("K must be a subgraph of F".into()));
    }
    Ok(moves_in(k, &f.difference(k)?, w, mode))
}

fn moves_in(k: &SimpleGraph, non: &SimpleGraph, w: &VertexSet, mode: SixCycleMode) -> Vec<(SimpleGraph, i64)> {
    let n = k.order();
    let inside = match mode {
        SixCycleMode::TwoIn => 2,
        SixCycleMode::OneIn => 1,
    };
    let before = six_cycle_statistic(k, w, mode);
    let layers = Layers::new(k, non);
    let none = VertexSet::empty(n);
    let mut seen: BTreeSet<GraphKey> = BTreeSet::new();
    let mut out = Vec::new();
    for v0 in 0..n {
        // Paths v0 → v5 of length 5 starting with a K-edge; the closing edge
        // v5v0 must be a non-edge of K.
        for_each_path(layers, v0, None, 5, &none, &mut |p| {
            let last = p[5];
            if !non.adjacent(last, v0) {
                return;
            }
            if p.iter().filter(|&&v| w.contains(v)).count() != inside {
                return;
            }
            let mut next = k.clone();
            apply_path_reversed(&mut next, p);
            next.add_edge(EdgePair::of(last, v0)).expect("in range");
            if seen.insert(next.canonical_key()) {
                let delta = six_cycle_statistic(&next, w, mode) - before;
                out.push((next, delta));
            }
        });
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Walks the path component of `g` from `start` (which must have degree 1),
/// returning the far end and the number of edges.
fn walk(g: &SimpleGraph, start: Vertex) -> Option<(Vertex, usize)> {
    if g.degree(start) != 1 {
        return None;
    }
    let (mut prev, mut cur, mut len) = (start, g.neighbors(start).next()?, 1);
    loop {
        if g.degree(cur) == 1 {
            return Some((cur, len));
        }
        if g.degree(cur) != 2 {
            return None;
        }
        let next = g.neighbors(cur).find(|&x| x != prev)?;
        (prev, cur, len) = (cur, next, len + 1);
        if len > g.order() {
            return None;
        }
    }
}

/// Whether `d` is a single cycle of exactly `len` edges.
fn is_single_cycle(d: &SimpleGraph, len: usize) -> bool {
    if d.edge_count() != len || (0..d.order()).any(|v| !matches!(d.degree(v), 0 | 2)) {
        return false;
    }
    let Some(start) = (0..d.order()).find(|&v| d.degree(v) == 2) else { return false };
    let first = d.neighbors(start).next().expect("degree 2");
    let mut cut = d.clone();
    cut.remove_edge(EdgePair::of(start, first)).expect("in range");
    walk(&cut, start).is_some_and(|(end, l)| end == first && l == len - 1)
}

/// Structural re-check of a switch between `k` and `k2`.
#[derive(Debug, Clone, PartialEq)]
pub enum SwitchRule {
    SingleEdge { f: SimpleGraph, e: EdgePair, ell: usize },
    DoubleEdge { f: SimpleGraph, e: EdgePair, g: EdgePair, ell: usize },
    TenCycle { f: SimpleGraph, e: EdgePair, g: EdgePair },
    SixCycle { f: SimpleGraph, w: VertexSet, mode: SixCycleMode },
}

impl SwitchRule {
    /// Whether `hi → lo` is a switch of this rule, judged from the symmetric
    /// difference alone (not by re-running the enumerator).
    pub fn relates(&self, hi: &SimpleGraph, lo: &SimpleGraph, d: usize) -> bool {
        if !hi.is_regular(d) || !lo.is_regular(d) || hi == lo {
            return false;
        }
        let Ok(diff) = hi.symmetric_difference(lo) else { return false };
        match self {
            SwitchRule::SingleEdge { f, e, ell } => {
                hi.is_subgraph_of(f)
                    && lo.is_subgraph_of(f)
                    && hi.has_edge(*e)
                    && !lo.has_edge(*e)
                    && is_single_cycle(&diff, 2 * ell + 2)
            }
            SwitchRule::DoubleEdge { f, e, g, ell } => {
                hi.is_subgraph_of(f)
                    && lo.is_subgraph_of(f)
                    && two_paths(&diff, hi, *e, *g, 2 * ell + 2, false)
            }
            SwitchRule::TenCycle { f, e, g } => {
                f.is_subgraph_of(hi) && f.is_subgraph_of(lo) && two_paths(&diff, hi, *e, *g, 4, true)
            }
            SwitchRule::SixCycle { f, w, mode } => {
                let inside = (0..hi.order()).filter(|&v| diff.degree(v) > 0 && w.contains(v)).count();
                let want = match mode {
                    SixCycleMode::TwoIn => 2,
                    SixCycleMode::OneIn => 1,
                };
                hi.is_subgraph_of(f)
                    && lo.is_subgraph_of(f)
                    && is_single_cycle(&diff, 6)
                    && inside == want
                    && six_cycle_statistic(lo, w, *mode) == six_cycle_statistic(hi, w, *mode) - 1
            }
        }
    }
}

/// `diff` is `{e, g}` plus two alternating paths of `len` edges joining the
/// ends of `e` to the ends of `g`, starting with an edge added to `hi`.
fn two_paths(diff: &SimpleGraph, hi: &SimpleGraph, e: EdgePair, g: EdgePair, len: usize, any_pairing: bool) -> bool {
    if !hi.has_edge(e) || hi.has_edge(g) || !diff.has_edge(e) || !diff.has_edge(g) {
        return false;
    }
    if diff.edge_count() != 2 * len + 2 {
        return false;
    }
    let mut inner = diff.clone();
    inner.remove_edge(e).expect("in range");
    inner.remove_edge(g).expect("in range");
    let ends = [walk(&inner, e.u()), walk(&inner, e.v())];
    let ok_pairing = |t1: Vertex, t2: Vertex| ends[0] == Some((t1, len)) && ends[1] == Some((t2, len));
    let paired = ok_pairing(g.u(), g.v()) || (any_pairing && ok_pairing(g.v(), g.u()));
    // First edge at each end of e must be new in lo, i.e. absent from hi.
    let fresh = |x: Vertex| inner.neighbors(x).next().is_some_and(|y| !hi.adjacent(x, y));
    paired && fresh(e.u()) && fresh(e.v())
}
