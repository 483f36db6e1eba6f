//! Alternating paths. Edge `j` of a path (1-based) is taken from the odd layer
//! when `j` is odd and from the even layer otherwise. Paths are simple, and
//! interior vertices avoid a forbidden set.

use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, Vertex, VertexSet};

/// Which layer the first edge of a path is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstEdge {
    /// `F \ K`, as in the switching constructions.
    #[default]
    Difference,
    /// `K`.
    Host,
}

/// A pair of layers for alternation.
#[derive(Debug, Clone, Copy)]
pub struct Layers<'a> {
    pub odd: &'a SimpleGraph,
    pub even: &'a SimpleGraph,
}

impl<'a> Layers<'a> {
    pub fn new(odd: &'a SimpleGraph, even: &'a SimpleGraph) -> Self {
        Self { odd, even }
    }

    fn layer(&self, j: usize) -> &'a SimpleGraph {
        if j % 2 == 1 {
            self.odd
        } else {
            self.even
        }
    }
}

/// Calls `visit` with the vertex sequence of every simple alternating path of
/// exactly `length` edges starting at `x`, ending at `target` when given,
/// whose interior vertices lie outside `avoid`.
pub fn for_each_path(
    layers: Layers<'_>,
    x: Vertex,
    target: Option<Vertex>,
    length: usize,
    avoid: &VertexSet,
    visit: &mut dyn FnMut(&[Vertex]),
) {
    let n = layers.odd.order();
    let mut on_path = vec![false; n];
    let mut path = Vec::with_capacity(length + 1);
    on_path[x] = true;
    path.push(x);
    extend(layers, target, length, avoid, &mut on_path, &mut path, visit);
}

fn extend(
    layers: Layers<'_>,
    target: Option<Vertex>,
    length: usize,
    avoid: &VertexSet,
    on_path: &mut [bool],
    path: &mut Vec<Vertex>,
    visit: &mut dyn FnMut(&[Vertex]),
) {
    let j = path.len();
    let last = path[j - 1];
    let final_edge = j == length;
    for w in layers.layer(j).neighbors(last) {
        if on_path[w] {
            continue;
        }
        if final_edge {
            if target.is_none_or(|t| t == w) {
                path.push(w);
                visit(path);
                path.pop();
            }
            continue;
        }
        // Interior vertex.
        if avoid.contains(w) || target == Some(w) {
            continue;
        }
        on_path[w] = true;
        path.push(w);
        extend(layers, target, length, avoid, on_path, path, visit);
        path.pop();
        on_path[w] = false;
    }
}

/// Number of paths described by the arguments of [`for_each_path`].
pub fn count_paths(layers: Layers<'_>, x: Vertex, target: Option<Vertex>, length: usize, avoid: &VertexSet) -> u128 {
    if length == 0 {
        return u128::from(target.is_none_or(|t| t == x));
    }
    let mut c = 0u128;
    for_each_path(layers, x, target, length, avoid, &mut |_| c += 1);
    c
}

/// An alternating-path question about a pair `K ⊆ F`.
#[derive(Debug, Clone)]
pub struct PathQuery<'a> {
    pub f: &'a SimpleGraph,
    pub k: &'a SimpleGraph,
    pub x: Vertex,
    pub y: Option<Vertex>,
    /// Number of edges.
    pub length: usize,
    /// Interior vertices must avoid this set.
    pub avoid: Option<&'a VertexSet>,
    pub first: FirstEdge,
}

impl PathQuery<'_> {
    fn check(&self) -> Result<SimpleGraph> {
        let n = self.f.order();
        if self.k.order() != n {
            return Err(Error::SizeMismatch { left: n, right: self.k.order() });
        }
        if !self.k.is_subgraph_of(self.f) {
            return Err(Error::Precondition("K must be a subgraph of F".into()));
        }
        for v in std::iter::once(self.x).chain(self.y) {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if self.avoid.is_some_and(|z| z.contains(v)) {
                return Err(Error::Precondition(format!("endpoint {} lies in the avoided set", v + 1)));
            }
        }
        if self.y == Some(self.x) && self.length > 0 {
            return Err(Error::Precondition("endpoints must differ".into()));
        }
        self.f.difference(self.k)
    }

    pub fn count(&self) -> Result<u128> {
        let diff = self.check()?;
        let layers = match self.first {
            FirstEdge::Difference => Layers::new(&diff, self.k),
            FirstEdge::Host => Layers::new(self.k, &diff),
        };
        let empty = VertexSet::empty(self.f.order());
        Ok(count_paths(layers, self.x, self.y, self.length, self.avoid.unwrap_or(&empty)))
    }
}

/// Alternating `x`–`y` paths of length `2ℓ` with first edge in `F \ K` and
/// interior avoiding `avoid`.
pub fn count_alternating_paths(
    f: &SimpleGraph,
    k: &SimpleGraph,
    x: Vertex,
    y: Vertex,
    half_length: usize,
    avoid: &VertexSet,
) -> Result<u128> {
    PathQuery { f, k, x, y: Some(y), length: 2 * half_length, avoid: Some(avoid), first: FirstEdge::Difference }
        .count()
}

/// Alternating paths of length `2ℓ` from `v` (any endpoint), first edge in `F \ K`.
pub fn count_alternating_from(f: &SimpleGraph, k: &SimpleGraph, v: Vertex, half_length: usize) -> Result<u128> {
    PathQuery { f, k, x: v, y: None, length: 2 * half_length, avoid: None, first: FirstEdge::Difference }.count()
}

/// `Σ d_{F\K}(u)` over alternating paths from `v` to `u` of length `2i - 1`
/// whose first edge is in `K`.
pub fn weighted_endpoint_sum(f: &SimpleGraph, k: &SimpleGraph, v: Vertex, i: usize) -> Result<u128> {
    if i == 0 {
        return Err(Error::Precondition("path length 2i - 1 needs i >= 1".into()));
    }
    let q = PathQuery { f, k, x: v, y: None, length: 2 * i - 1, avoid: None, first: FirstEdge::Host };
    let diff = q.check()?;
    let empty = VertexSet::empty(f.order());
    let mut sum = 0u128;
    for_each_path(Layers::new(k, &diff), v, None, 2 * i - 1, &empty, &mut |p| {
        sum += diff.degree(*p.last().expect("non-empty")) as u128;
    });
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_and_f() -> (SimpleGraph, SimpleGraph) {
        // K: perfect matching 1-2, 3-4, 5-6 on six vertices; F = K_6.
        let k: SimpleGraph = "n=6;edges=1-2,3-4,5-6".parse().unwrap();
        (SimpleGraph::complete(6), k)
    }

    #[test]
    fn hand_counted_small_cases() {
        let (f, k) = k_and_f();
        let none = VertexSet::empty(6);
        // Length 2 from vertex 1 (0-based 0): a non-K edge to w ∉ {1, 2}, then w's
        // matching partner: w ∈ {3,4,5,6} gives 4 paths; endpoint 2 is unreachable.
        assert_eq!(count_alternating_from(&f, &k, 0, 1).unwrap(), 4);
        assert_eq!(count_alternating_paths(&f, &k, 0, 1, 1, &none).unwrap(), 0);
        assert_eq!(count_alternating_paths(&f, &k, 0, 3, 1, &none).unwrap(), 1);
        let z = VertexSet::from_vertices(6, [2]).unwrap();
        assert_eq!(count_alternating_paths(&f, &k, 0, 3, 1, &z).unwrap(), 0);
        // Weighted sum with i = 1: the single K-edge 1-2, then d_{F\K}(2) = 4.
        assert_eq!(weighted_endpoint_sum(&f, &k, 0, 1).unwrap(), 4);
    }

    #[test]
    fn rejects_bad_queries() {
        let (f, k) = k_and_f();
        let z = VertexSet::from_vertices(6, [0]).unwrap();
        assert!(count_alternating_paths(&f, &k, 0, 3, 1, &z).is_err());
        assert!(count_alternating_paths(&f, &k, 0, 0, 1, &VertexSet::empty(6)).is_err());
        assert!(count_alternating_from(&k, &f, 0, 1).is_err());
        assert!(weighted_endpoint_sum(&f, &k, 0, 0).is_err());
    }

    #[test]
    fn zero_length_paths() {
        let (f, k) = k_and_f();
        let layers = Layers::new(&f, &k);
        let none = VertexSet::empty(6);
        assert_eq!(count_paths(layers, 2, None, 0, &none), 1);
        assert_eq!(count_paths(layers, 2, Some(3), 0, &none), 0);
    }
}
