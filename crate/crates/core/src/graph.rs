//! Labeled simple graphs on `{0, .., n-1}` stored as adjacency bit-rows.
//!
//! Vertices are 0-based in the API. The text literal (`n=5;edges=1-2,2-3`)
//! is 1-based, matching the way graphs are written by hand.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// An unordered pair `{u, v}` stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePair {
    u: Vertex,
    v: Vertex,
}

impl EdgePair {
    pub fn new(a: Vertex, b: Vertex) -> Result<Self> {
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        Ok(Self { u: a.min(b), v: a.max(b) })
    }

    /// Panics on a self-loop; for call sites where `a != b` is structural.
    pub(crate) fn of(a: Vertex, b: Vertex) -> Self {
        debug_assert_ne!(a, b);
        Self { u: a.min(b), v: a.max(b) }
    }

    pub fn u(self) -> Vertex {
        self.u
    }

    pub fn v(self) -> Vertex {
        self.v
    }

    pub fn contains(self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    pub fn other(self, x: Vertex) -> Option<Vertex> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }

    pub fn is_disjoint(self, other: EdgePair) -> bool {
        !self.contains(other.u) && !self.contains(other.v)
    }

    /// Position in the canonical (lexicographic) order of all pairs on `n` vertices.
    pub fn index(self, n: usize) -> usize {
        pair_index(n, self.u, self.v)
    }

    pub fn from_index(n: usize, idx: usize) -> Self {
        let mut u = 0;
        let mut base = 0;
        loop {
            let row = n - u - 1;
            if idx < base + row {
                return Self { u, v: u + 1 + idx - base };
            }
            base += row;
            u += 1;
        }
    }
}

impl fmt::Display for EdgePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u + 1, self.v + 1)
    }
}

impl FromStr for EdgePair {
    type Err = Error;

    /// Parses the 1-based `u-v` form used by [`fmt::Display`].
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad edge {s:?}"));
        let (a, b) = s.trim().split_once('-').ok_or_else(bad)?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a == 0 || b == 0 {
            return Err(bad());
        }
        Self::new(a - 1, b - 1)
    }
}

impl Serialize for EdgePair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EdgePair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[inline]
pub fn pair_index(n: usize, u: Vertex, v: Vertex) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// `C(n, 2)`.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A subset of `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    n: usize,
    bits: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        Self { n, bits: vec![0; words_for(n)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_vertices(n: usize, vs: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut s = Self::empty(n);
        for v in vs {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Builds a set from the low `n` bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut s = Self::empty(n);
        s.bits[0] = if n >= 64 { mask } else { mask & ((1u64 << n) - 1) };
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: Vertex) {
        self.bits[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: Vertex) {
        self.bits[v / 64] &= !(1 << (v % 64));
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < self.n && self.bits[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        iter_bits(&self.bits)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        Self::full(self.n).difference(self)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0)
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.n, other.n, "vertex sets over different universes");
        Self {
            n: self.n,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| op(a, b)).collect(),
        }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.bits
    }
}

fn iter_bits(words: &[u64]) -> impl Iterator<Item = Vertex> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(wi * 64 + b)
        })
    })
}

/// Canonical, totally ordered key of a labeled graph: equal keys iff equal edge sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphKey {
    n: usize,
    rows: Vec<u64>,
}

/// A labeled simple graph.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edges: usize,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Self { n, words, rows: vec![0; n * words], edges: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            g.add_edge(EdgePair::new(a, b)?)?;
        }
        Ok(g)
    }

    pub fn from_pairs(n: usize, edges: impl IntoIterator<Item = EdgePair>) -> Result<Self> {
        let mut g = Self::empty(n);
        for e in edges {
            g.add_edge(e)?;
        }
        Ok(g)
    }

    /// Graph whose edge set is the set bits of `mask` under [`EdgePair::index`].
    ///
    /// Panics if a bit at or beyond `C(n, 2)` is set.
    pub fn from_mask(n: usize, mask: u128) -> Self {
        let pairs = pair_count(n);
        assert!(pairs >= 128 || mask >> pairs == 0, "mask has bits beyond C({n}, 2)");
        let mut g = Self::empty(n);
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let e = EdgePair::from_index(n, i);
            g.set(e.u, e.v);
        }
        g
    }

    /// Edge-index bitmask; `None` when `C(n,2) > 128`.
    pub fn to_mask(&self) -> Option<u128> {
        if pair_count(self.n) > 128 {
            return None;
        }
        Some(self.edges().fold(0u128, |m, e| m | 1u128 << e.index(self.n)))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    fn row(&self, v: Vertex) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    fn set(&mut self, u: Vertex, v: Vertex) {
        if !self.adjacent(u, v) {
            self.rows[u * self.words + v / 64] |= 1 << (v % 64);
            self.rows[v * self.words + u / 64] |= 1 << (u % 64);
            self.edges += 1;
        }
    }

    #[inline]
    fn clear(&mut self, u: Vertex, v: Vertex) {
        if self.adjacent(u, v) {
            self.rows[u * self.words + v / 64] &= !(1 << (v % 64));
            self.rows[v * self.words + u / 64] &= !(1 << (u % 64));
            self.edges -= 1;
        }
    }

    pub fn check_edge(&self, e: EdgePair) -> Result<()> {
        if e.v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: e.v, n: self.n });
        }
        Ok(())
    }

    /// Adds `e`; returns whether it was newly inserted.
    pub fn add_edge(&mut self, e: EdgePair) -> Result<bool> {
        self.check_edge(e)?;
        let fresh = !self.adjacent(e.u, e.v);
        self.set(e.u, e.v);
        Ok(fresh)
    }

    /// Removes `e`; returns whether it was present.
    pub fn remove_edge(&mut self, e: EdgePair) -> Result<bool> {
        self.check_edge(e)?;
        let present = self.adjacent(e.u, e.v);
        self.clear(e.u, e.v);
        Ok(present)
    }

    pub fn with_edge(&self, e: EdgePair) -> Result<Self> {
        let mut g = self.clone();
        g.add_edge(e)?;
        Ok(g)
    }

    pub fn without_edge(&self, e: EdgePair) -> Result<Self> {
        let mut g = self.clone();
        g.remove_edge(e)?;
        Ok(g)
    }

    #[inline]
    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && v < self.n && self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn has_edge(&self, e: EdgePair) -> bool {
        self.adjacent(e.u, e.v)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn is_regular(&self, d: usize) -> bool {
        (0..self.n).all(|v| self.degree(v) == d)
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        iter_bits(self.row(v))
    }

    pub fn neighbor_set(&self, v: Vertex) -> VertexSet {
        VertexSet { n: self.n, bits: self.row(v).to_vec() }
    }

    /// Neighbourhood of a set, excluding the set itself.
    pub fn neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self.n);
        for v in set.iter() {
            for (o, r) in out.bits.iter_mut().zip(self.row(v)) {
                *o |= r;
            }
        }
        out.difference(set)
    }

    /// Number of neighbours of `v` inside `set`.
    pub fn degree_into(&self, v: Vertex, set: &VertexSet) -> usize {
        self.row(v).iter().zip(set.words()).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// `e(U)`: edges with both ends in `set`.
    pub fn internal_edges(&self, set: &VertexSet) -> usize {
        set.iter().map(|v| self.degree_into(v, set)).sum::<usize>() / 2
    }

    /// `e(U, V)`: ordered pairs `(u, v) ∈ U × V` joined by an edge. Edges inside
    /// `U ∩ V` are counted twice, as in the usual convention.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> usize {
        a.iter().map(|v| self.degree_into(v, b)).sum()
    }

    /// `E_{≥2}(U)`: edges `xy` with `x ∈ set`, `y ∉ set`, where `y` has at
    /// least two neighbours in `set`.
    pub fn multi_covered_edges(&self, set: &VertexSet) -> Vec<EdgePair> {
        let heavy: Vec<bool> =
            (0..self.n).map(|v| !set.contains(v) && self.degree_into(v, set) >= 2).collect();
        self.edges()
            .filter(|e| (heavy[e.u] && set.contains(e.v)) || (heavy[e.v] && set.contains(e.u)))
            .collect()
    }

    /// Edges in canonical order: by `u`, then `v`.
    pub fn edges(&self) -> impl Iterator<Item = EdgePair> + '_ {
        (0..self.n).flat_map(move |u| {
            iter_bits(self.row(u)).filter(move |&v| v > u).map(move |v| EdgePair { u, v })
        })
    }

    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.adjacent(u, v) {
                    g.set(u, v);
                }
            }
        }
        g
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    fn combine(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self> {
        self.same_order(other)?;
        let rows: Vec<u64> = self.rows.iter().zip(&other.rows).map(|(&a, &b)| op(a, b)).collect();
        let edges = rows.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2;
        Ok(Self { n: self.n, words: self.words, rows, edges })
    }

    /// Edges of `self` not in `other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a & !b)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a & b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a ^ b)
    }

    pub fn is_subgraph_of(&self, other: &Self) -> bool {
        self.n == other.n && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn canonical_key(&self) -> GraphKey {
        GraphKey { n: self.n, rows: self.rows.clone() }
    }

    pub fn from_key(key: &GraphKey) -> Self {
        let words = words_for(key.n);
        let edges = key.rows.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2;
        Self { n: key.n, words, rows: key.rows.clone(), edges }
    }

    pub fn parse_literal(s: &str) -> Result<Self> {
        s.parse()
    }

    pub fn to_literal(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};edges=", self.n)?;
        for (i, e) in self.edges().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimpleGraph({self})")
    }
}

impl FromStr for SimpleGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("{msg} in {s:?}"));
        let (head, tail) = s.trim().split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let n: usize = head
            .trim()
            .strip_prefix("n=")
            .ok_or_else(|| bad("expected 'n='"))?
            .trim()
            .parse()
            .map_err(|_| bad("bad vertex count"))?;
        let list = tail.trim().strip_prefix("edges=").ok_or_else(|| bad("expected 'edges='"))?;
        let mut g = Self::empty(n);
        for item in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (a, b) = item.split_once('-').ok_or_else(|| bad("edge without '-'"))?;
            let parse = |t: &str| -> Result<usize> {
                let x: usize = t.trim().parse().map_err(|_| bad("bad vertex label"))?;
                if x == 0 || x > n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
                Ok(x - 1)
            };
            let e = EdgePair::new(parse(a)?, parse(b)?)?;
            if !g.add_edge(e)? {
                return Err(bad("duplicate edge"));
            }
        }
        Ok(g)
    }
}

impl Serialize for SimpleGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SimpleGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Calls `f` with every graph on `n` vertices having exactly `size` edges, in
/// lexicographic order of edge index sets.
pub fn for_each_edge_subset(n: usize, size: usize, f: &mut dyn FnMut(&SimpleGraph)) {
    let pairs: Vec<EdgePair> = SimpleGraph::complete(n).edges().collect();
    fn rec(pairs: &[EdgePair], start: usize, left: usize, g: &mut SimpleGraph, f: &mut dyn FnMut(&SimpleGraph)) {
        if left == 0 {
            f(g);
            return;
        }
        for i in start..=pairs.len() - left {
            g.add_edge(pairs[i]).expect("in range");
            rec(pairs, i + 1, left - 1, g, f);
            g.remove_edge(pairs[i]).expect("in range");
        }
    }
    if size <= pairs.len() {
        rec(&pairs, 0, size, &mut SimpleGraph::empty(n), f);
    }
}
