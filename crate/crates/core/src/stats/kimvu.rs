//! Expectations consumed by the Kim–Vu polynomial concentration inequality,
//! for the count of alternating paths through a random set of non-edges.
//!
//! Every non-edge of `K` is present independently with probability `p`; `Y`
//! counts `x`–`y` paths of length `2k` alternating between present non-edges
//! (first) and edges of `K`, with interior vertices outside `Z`. Writing `Y`
//! as a polynomial in the indicator variables, each path contributes the
//! monomial of its `k` non-edges.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_index, SimpleGraph, Vertex, VertexSet};

use super::{ratio_str, ratio_vec};

/// Largest half-length handled.
pub const MAX_HALF_LENGTH: usize = 4;
/// Largest number of paths enumerated.
pub const PATH_LIMIT: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialStat {
    pub k: usize,
    #[serde(with = "ratio_str")]
    pub p: BigRational,
    /// Number of paths, `Σ_I w(I)`.
    pub paths: u64,
    /// Number of distinct supports `I`.
    pub supports: usize,
    #[serde(with = "ratio_str")]
    pub e_y: BigRational,
    /// `E_i Y` for `i = 0..=k`; `E_0 Y = E Y`.
    #[serde(with = "ratio_vec")]
    pub e_i: Vec<BigRational>,
    #[serde(with = "ratio_str")]
    pub e_prime: BigRational,
    #[serde(with = "ratio_str")]
    pub e_max: BigRational,
}

/// Dense adjacency, kept separate from the bit rows used elsewhere so that
/// this enumerator shares no code with the switching path counter.
struct Matrix {
    n: usize,
    adj: Vec<bool>,
}

impl Matrix {
    fn of(k: &SimpleGraph) -> Self {
        let n = k.order();
        let mut adj = vec![false; n * n];
        for e in k.edges() {
            adj[e.u() * n + e.v()] = true;
            adj[e.v() * n + e.u()] = true;
        }
        Self { n, adj }
    }

    fn edge(&self, a: Vertex, b: Vertex) -> bool {
        self.adj[a * self.n + b]
    }
}

struct Walk<'a> {
    k: &'a Matrix,
    y: Vertex,
    length: usize,
    blocked: Vec<bool>,
    support: Vec<usize>,
    weights: BTreeMap<Vec<usize>, u64>,
    paths: u64,
}

impl Walk<'_> {
    fn step(&mut self, at: Vertex, depth: usize) -> Result<()> {
        let n = self.k.n;
        let odd = depth % 2 == 0; // the edge about to be taken is edge depth + 1
        for w in 0..n {
            if w == at || self.blocked[w] || self.k.edge(at, w) == odd {
                continue;
            }
            let last = depth + 1 == self.length;
            if last != (w == self.y) {
                continue;
            }
            if odd {
                self.support.push(pair_index(n, at.min(w), at.max(w)));
            }
            if last {
                let mut key = self.support.clone();
                key.sort_unstable();
                *self.weights.entry(key).or_insert(0) += 1;
                self.paths += 1;
                if self.paths > PATH_LIMIT {
                    return Err(Error::Capacity(format!("more than {PATH_LIMIT} paths")));
                }
            } else {
                self.blocked[w] = true;
                self.step(w, depth + 1)?;
                self.blocked[w] = false;
            }
            if odd {
                self.support.pop();
            }
        }
        Ok(())
    }
}

/// `E Y`, `E_i Y`, `E′Y` and `E^max Y`, exactly.
pub fn path_polynomial_stats(
    k: &SimpleGraph,
    p: &BigRational,
    x: Vertex,
    y: Vertex,
    half_length: usize,
    z: &VertexSet,
) -> Result<PolynomialStat> {
    let n = k.order();
    if half_length == 0 || half_length > MAX_HALF_LENGTH {
        return Err(Error::Capacity(format!("half-length must lie in 1..={MAX_HALF_LENGTH}, got {half_length}")));
    }
    if *p < BigRational::zero() || *p > BigRational::one() {
        return Err(Error::InvalidParams(format!("p = {p} is not a probability")));
    }
    if z.universe() != n {
        return Err(Error::SizeMismatch { left: n, right: z.universe() });
    }
    for v in [x, y] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if z.contains(v) {
            return Err(Error::Precondition(format!("endpoint {} lies in the avoided set", v + 1)));
        }
    }
    if x == y {
        return Err(Error::Precondition("endpoints must differ".into()));
    }
    let matrix = Matrix::of(k);
    let mut blocked: Vec<bool> = (0..n).map(|v| z.contains(v)).collect();
    blocked[x] = true;
    let mut walk = Walk {
        k: &matrix,
        y,
        length: 2 * half_length,
        blocked,
        support: Vec::with_capacity(half_length),
        weights: BTreeMap::new(),
        paths: 0,
    };
    walk.step(x, 0)?;

    // containing[A] = Σ_{I ⊇ A} w(I), over non-empty A.
    let mut best = vec![0u64; half_length + 1];
    best[0] = walk.paths;
    let mut containing: HashMap<Vec<usize>, u64> = HashMap::new();
    for (support, &w) in &walk.weights {
        for mask in 1u32..(1 << half_length) {
            let a: Vec<usize> = (0..half_length).filter(|b| mask >> b & 1 == 1).map(|b| support[b]).collect();
            *containing.entry(a).or_insert(0) += w;
        }
    }
    for (a, &c) in &containing {
        best[a.len()] = best[a.len()].max(c);
    }
    let pow = |e: usize| -> BigRational { (0..e).fold(BigRational::one(), |acc, _| acc * p) };
    let e_i: Vec<BigRational> =
        best.iter().enumerate().map(|(i, &c)| BigRational::from_integer(BigInt::from(c)) * pow(half_length - i)).collect();
    let e_prime = e_i[1..].iter().max().cloned().unwrap_or_else(BigRational::zero);
    let e_max = e_prime.clone().max(e_i[0].clone());
    Ok(PolynomialStat {
        k: half_length,
        p: p.clone(),
        paths: walk.paths,
        supports: walk.weights.len(),
        e_y: e_i[0].clone(),
        e_i,
        e_prime,
        e_max,
    })
}

/// `p = m / (C(n,2) - dn/2) = δ/(n-1-d)` with `δ = 2m/n`.
pub fn inclusion_probability(n: usize, d: usize, m: usize) -> Result<BigRational> {
    if d + 1 >= n {
        return Err(Error::InvalidParams(format!("no non-edges when d = {d} and n = {n}")));
    }
    Ok(BigRational::new(BigInt::from(2 * m), BigInt::from(n * (n - 1 - d))))
}

/// The path statistics set against their heuristic value `δ^k d^k / n` and the
/// Kim–Vu deviation `8^k √(k!) √(E^max Y · E′Y) α^k` at `α = ln² n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KimVuReport {
    pub n: usize,
    pub d: usize,
    pub delta: f64,
    pub stat: PolynomialStat,
    pub reference: f64,
    /// `(E Y - reference) / reference`.
    pub relative_gap: f64,
    pub alpha: f64,
    pub deviation_bound: f64,
    /// `deviation_bound / E Y`; anything above 1 says nothing at this size.
    pub relative_deviation_bound: f64,
}

pub fn kim_vu_report(n: usize, d: usize, stat: PolynomialStat) -> KimVuReport {
    let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
    let k = stat.k as i32;
    let delta = f(&stat.p) * (n - 1 - d) as f64;
    let reference = (delta * d as f64).powi(k) / n as f64;
    let e_y = f(&stat.e_y);
    let alpha = (n as f64).ln().powi(2);
    let factorial: f64 = (1..=stat.k).map(|i| i as f64).product();
    let deviation_bound = 8f64.powi(k) * factorial.sqrt() * (f(&stat.e_max) * f(&stat.e_prime)).sqrt() * alpha.powi(k);
    KimVuReport {
        n,
        d,
        delta,
        relative_gap: (e_y - reference) / reference,
        reference,
        alpha,
        relative_deviation_bound: deviation_bound / e_y,
        deviation_bound,
        stat,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn matching6() -> SimpleGraph {
        "n=6;edges=1-2,3-4,5-6".parse().unwrap()
    }

    #[test]
    fn zero_probability_gives_zero_mean() {
        let k = matching6();
        let s = path_polynomial_stats(&k, &BigRational::zero(), 0, 3, 1, &VertexSet::empty(6)).unwrap();
        assert!(s.e_y.is_zero());
        assert_eq!(s.paths, 1);
        // The top level has no free variables left: E_k Y = max w(I) = 1.
        assert_eq!(s.e_i[1], BigRational::one());
    }

    #[test]
    fn hand_computed_matching() {
        // Half-length 1 from vertex 1 to vertex 4 (0-based 0 to 3): the non-edge
        // 1-3 then the K-edge 3-4. One path, one support.
        let k = matching6();
        let p = ratio(1, 3);
        let s = path_polynomial_stats(&k, &p, 0, 3, 1, &VertexSet::empty(6)).unwrap();
        assert_eq!(s.paths, 1);
        assert_eq!(s.e_y, p);
        assert_eq!(s.e_max, BigRational::one());
        // Half-length 2 from 1 to 2: 1 -a- u -K- u' -b- w -K- 2 is impossible
        // because 2's only K-neighbour is 1; the last edge must be a K-edge.
        let s = path_polynomial_stats(&k, &p, 0, 1, 2, &VertexSet::empty(6)).unwrap();
        assert_eq!(s.paths, 0);
        assert!(s.e_max.is_zero());
        // 1 to 4 with half-length 2: 1-5-6-3-4 and 1-6-5-3-4.
        let s = path_polynomial_stats(&k, &p, 0, 3, 2, &VertexSet::empty(6)).unwrap();
        assert_eq!(s.paths, 2);
        assert_eq!(s.supports, 2);
        assert_eq!(s.e_y, ratio(2, 9));
        // No non-edge is shared between the two supports: E_1 Y = p.
        assert_eq!(s.e_i[1], p);
        assert_eq!(s.e_i[2], BigRational::one());
        let z = VertexSet::from_vertices(6, [4]).unwrap();
        assert_eq!(path_polynomial_stats(&k, &p, 0, 3, 2, &z).unwrap().paths, 0);
    }

    #[test]
    fn rejects_bad_input() {
        let k = matching6();
        let none = VertexSet::empty(6);
        let p = ratio(1, 2);
        assert!(path_polynomial_stats(&k, &p, 0, 0, 1, &none).is_err());
        assert!(path_polynomial_stats(&k, &p, 0, 3, 0, &none).is_err());
        assert!(path_polynomial_stats(&k, &p, 0, 3, 5, &none).is_err());
        assert!(path_polynomial_stats(&k, &ratio(3, 2), 0, 3, 1, &none).is_err());
        let z = VertexSet::from_vertices(6, [3]).unwrap();
        assert!(path_polynomial_stats(&k, &p, 0, 3, 1, &z).is_err());
    }

    #[test]
    fn report_fields() {
        let k: SimpleGraph = "n=10;edges=1-2,2-3,3-4,4-5,5-6,6-7,7-8,8-9,9-10,1-10".parse().unwrap();
        let p = inclusion_probability(10, 2, 10).unwrap();
        assert_eq!(p, ratio(20, 70));
        let s = path_polynomial_stats(&k, &p, 0, 5, 2, &VertexSet::empty(10)).unwrap();
        let r = kim_vu_report(10, 2, s);
        assert!((r.delta - 2.0).abs() < 1e-12);
        assert!((r.reference - 1.6).abs() < 1e-12);
        assert!(r.deviation_bound > 1.0);
        assert!(r.stat.e_max >= r.stat.e_y && r.stat.e_max >= r.stat.e_prime);
    }
}
