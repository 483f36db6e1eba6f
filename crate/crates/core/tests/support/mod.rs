//! Independent reference implementations used by the acceptance suite. None
//! of these call into the library's counting, kernel or path code; they work
//! from adjacency matrices and plain enumeration.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use sandwich_core::{EdgePair, SimpleGraph};

pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> SimpleGraph {
    let mut g = SimpleGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(EdgePair::new(u, v).unwrap()).unwrap();
            }
        }
    }
    g
}

/// A cubic graph on an even number of vertices: the Möbius ladder, randomly
/// relabelled and then scrambled by degree-preserving double-edge swaps. Not
/// uniform, only varied.
pub fn shuffled_cubic<R: Rng>(n: usize, rng: &mut R) -> SimpleGraph {
    assert!(n >= 6 && n % 2 == 0);
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut g = SimpleGraph::empty(n);
    for v in 0..n {
        for w in [(v + 1) % n, (v + n / 2) % n] {
            g.add_edge(EdgePair::new(label[v], label[w]).unwrap()).unwrap();
        }
    }
    for _ in 0..10 * n {
        let edges = edge_list(&g);
        let (a, b) = edges[rng.random_range(0..edges.len())];
        let (c, d) = edges[rng.random_range(0..edges.len())];
        // Replace ab, cd by ac, bd when that keeps the graph simple.
        if a == c || a == d || b == c || b == d || g.adjacent(a, c) || g.adjacent(b, d) {
            continue;
        }
        g.remove_edge(EdgePair::new(a, b).unwrap()).unwrap();
        g.remove_edge(EdgePair::new(c, d).unwrap()).unwrap();
        g.add_edge(EdgePair::new(a, c).unwrap()).unwrap();
        g.add_edge(EdgePair::new(b, d).unwrap()).unwrap();
    }
    g
}

fn edge_list(g: &SimpleGraph) -> Vec<(usize, usize)> {
    let n = g.order();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if g.adjacent(u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

/// Number of spanning subgraphs of `f` with degree sequence `target`, by
/// include/exclude search over the edge list.
pub fn brute_count_degrees(f: &SimpleGraph, target: &[usize]) -> u64 {
    let edges = edge_list(f);
    let n = f.order();
    // last[v]: index of the last edge touching v, after which deg(v) is final.
    let mut last = vec![None; n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        last[u] = Some(i);
        last[v] = Some(i);
    }
    if (0..n).any(|v| last[v].is_none() && target[v] != 0) {
        return 0;
    }
    fn go(i: usize, edges: &[(usize, usize)], last: &[Option<usize>], target: &[usize], deg: &mut [usize]) -> u64 {
        if i == edges.len() {
            return u64::from(deg.iter().zip(target).all(|(a, b)| a == b));
        }
        let (u, v) = edges[i];
        let settled = |deg: &[usize], w: usize| last[w] != Some(i) || deg[w] == target[w];
        let mut total = 0;
        if deg[u] < target[u] && deg[v] < target[v] {
            deg[u] += 1;
            deg[v] += 1;
            if settled(deg, u) && settled(deg, v) {
                total += go(i + 1, edges, last, target, deg);
            }
            deg[u] -= 1;
            deg[v] -= 1;
        }
        if settled(deg, u) && settled(deg, v) {
            total += go(i + 1, edges, last, target, deg);
        }
        total
    }
    go(0, &edges, &last, target, &mut vec![0; n])
}

pub fn brute_count(f: &SimpleGraph, d: usize) -> u64 {
    brute_count_degrees(f, &vec![d; f.order()])
}

/// `#{K d-regular : F ⊆ K}`.
pub fn brute_extensions(f: &SimpleGraph, d: usize) -> u64 {
    let n = f.order();
    let mut target = Vec::with_capacity(n);
    for v in 0..n {
        match d.checked_sub(f.degree(v)) {
            Some(t) => target.push(t),
            None => return 0,
        }
    }
    brute_count_degrees(&f.complement(), &target)
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub type Law = BTreeMap<SimpleGraph, BigRational>;

/// Marginal of the edge-deletion chain after `i` steps, started from `K_n`:
/// from `F`, remove `e` with probability proportional to `|K_d(F - e)|`.
pub fn deletion_chain(n: usize, d: usize, steps: usize) -> Vec<Law> {
    let mut law = Law::new();
    law.insert(SimpleGraph::complete(n), BigRational::one());
    let mut out = vec![law.clone()];
    for _ in 0..steps {
        let mut next = Law::new();
        for (f, p) in &law {
            let moves: Vec<(SimpleGraph, u64)> = edge_list(f)
                .into_iter()
                .map(|(u, v)| {
                    let g = f.without_edge(EdgePair::new(u, v).unwrap()).unwrap();
                    let w = brute_count(&g, d);
                    (g, w)
                })
                .filter(|m| m.1 > 0)
                .collect();
            let total: u64 = moves.iter().map(|m| m.1).sum();
            for (g, w) in moves {
                *next.entry(g).or_insert_with(BigRational::zero) += p * ratio(w, total);
            }
        }
        law = next;
        out.push(law.clone());
    }
    out
}

/// Same for the addition chain from the empty graph: add `e` with probability
/// proportional to `#{K ⊇ F + e}`.
pub fn addition_chain(n: usize, d: usize, steps: usize) -> Vec<Law> {
    let mut law = Law::new();
    law.insert(SimpleGraph::empty(n), BigRational::one());
    let mut out = vec![law.clone()];
    for _ in 0..steps {
        let mut next = Law::new();
        for (f, p) in &law {
            let moves: Vec<(SimpleGraph, u64)> = edge_list(&f.complement())
                .into_iter()
                .map(|(u, v)| {
                    let g = f.with_edge(EdgePair::new(u, v).unwrap()).unwrap();
                    let w = brute_extensions(&g, d);
                    (g, w)
                })
                .filter(|m| m.1 > 0)
                .collect();
            let total: u64 = moves.iter().map(|m| m.1).sum();
            for (g, w) in moves {
                *next.entry(g).or_insert_with(BigRational::zero) += p * ratio(w, total);
            }
        }
        law = next;
        out.push(law.clone());
    }
    out
}

fn graphs_with_edges(n: usize, m: usize) -> Vec<SimpleGraph> {
    let all = edge_list(&SimpleGraph::complete(n));
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn go(start: usize, m: usize, all: &[(usize, usize)], pick: &mut Vec<usize>, n: usize, out: &mut Vec<SimpleGraph>) {
        if pick.len() == m {
            out.push(SimpleGraph::from_edges(n, pick.iter().map(|&i| all[i])).unwrap());
            return;
        }
        for i in start..all.len() {
            pick.push(i);
            go(i + 1, m, all, pick, n, out);
            pick.pop();
        }
    }
    go(0, m, &all, &mut pick, n, &mut out);
    out
}

/// `P(F) = |K_d(F)| / (|K_d(n)| C(C(n,2) - dn/2, e(F) - dn/2))` on graphs with
/// `edges` edges.
pub fn upper_closed_form(n: usize, d: usize, edges: usize) -> Law {
    let pairs = (n * (n - 1) / 2) as u64;
    let half = (d * n / 2) as u64;
    let regular = brute_count(&SimpleGraph::complete(n), d);
    let denom = regular * binom(pairs - half, edges as u64 - half);
    graphs_with_edges(n, edges)
        .into_iter()
        .filter_map(|f| {
            let c = brute_count(&f, d);
            (c > 0).then(|| (f, ratio(c, denom)))
        })
        .collect()
}

/// `P(F) = #{K ⊇ F} / (|K_d(n)| C(dn/2, dn/2 - e(F)))`.
pub fn lower_closed_form(n: usize, d: usize, edges: usize) -> Law {
    let half = (d * n / 2) as u64;
    let regular = brute_count(&SimpleGraph::complete(n), d);
    let denom = regular * binom(half, half - edges as u64);
    graphs_with_edges(n, edges)
        .into_iter()
        .filter_map(|f| {
            let c = brute_extensions(&f, d);
            (c > 0).then(|| (f, ratio(c, denom)))
        })
        .collect()
}

/// Alternating `x`–`y` paths with `2ℓ` edges (odd edges in `F \ K`, even
/// edges in `K`), simple, interior avoiding `z` (bitmask), by joining the
/// halves that meet at the middle vertex.
pub fn mitm_paths(f: &SimpleGraph, k: &SimpleGraph, x: usize, y: usize, ell: usize, z: u32) -> u128 {
    let n = f.order();
    assert!(n <= 32 && ell >= 1);
    let diff: Vec<Vec<bool>> =
        (0..n).map(|u| (0..n).map(|v| f.adjacent(u, v) && !k.adjacent(u, v)).collect()).collect();
    let kk: Vec<Vec<bool>> = (0..n).map(|u| (0..n).map(|v| k.adjacent(u, v)).collect()).collect();
    // Edge j (1-based) of the full path.
    let layer = |j: usize| if j % 2 == 1 { &diff } else { &kk };
    let blocked = |v: usize, other_end: usize| z & (1 << v) != 0 || v == other_end;

    // Half paths as (middle vertex, vertex mask). Forward: v0 = x, edges 1..=ℓ.
    let mut front: Vec<(usize, u32)> = vec![(x, 1 << x)];
    for j in 1..=ell {
        let mut next = Vec::new();
        for &(v, mask) in &front {
            for w in 0..n {
                if layer(j)[v][w] && mask & (1 << w) == 0 && !blocked(w, y) {
                    next.push((w, mask | 1 << w));
                }
            }
        }
        front = next;
    }
    // Backward: v_{2ℓ} = y, edges 2ℓ down to ℓ + 1.
    let mut back: Vec<(usize, u32)> = vec![(y, 1 << y)];
    for j in (ell + 1..=2 * ell).rev() {
        let mut next = Vec::new();
        for &(v, mask) in &back {
            for w in 0..n {
                if layer(j)[v][w] && mask & (1 << w) == 0 && !blocked(w, x) {
                    next.push((w, mask | 1 << w));
                }
            }
        }
        back = next;
    }
    let mut by_mid: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (w, mask) in back {
        by_mid.entry(w).or_default().push(mask);
    }
    let mut total = 0u128;
    for (w, mask) in front {
        if let Some(list) = by_mid.get(&w) {
            total += list.iter().filter(|&&m| m & mask == 1 << w).count() as u128;
        }
    }
    total
}

/// `Σ_{i=1}^{N} C0 η'_{i+R-1} (dn/2) / (C(n,2) - dn/2 - R - i + 1)` with
/// `N = C(n,2) - dn/2 - 2R` and `η'_j = max{μ/ln n, (n ln n/(C(n,2) - dn/2 - j))^{1/8}}`.
pub fn schedule_sum(n: usize, d: usize, eps: f64, c0: f64, mu: f64) -> (f64, usize) {
    let pairs = n * (n - 1) / 2;
    let half = d * n / 2;
    let free = pairs - half;
    let r = (eps * (d * n) as f64 / 8.0).floor() as usize;
    let steps = free.saturating_sub(2 * r);
    let nf = n as f64;
    let eta = |j: usize| {
        if j >= free {
            0.0
        } else {
            (mu / nf.ln()).max((nf * nf.ln() / (free - j) as f64).powf(1.0 / 8.0))
        }
    };
    let mut s = 0.0;
    for i in 1..=steps {
        s += eta(i + r - 1) * half as f64 / (free - r - i + 1) as f64;
    }
    (c0 * s, r)
}
