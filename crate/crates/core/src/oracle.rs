//! Exact counting and enumeration of spanning subgraphs with a prescribed
//! degree sequence, specialised to `d`-regular ones.
//!
//! Vertices are processed in label order. At vertex `v` we pick which of its
//! later host-neighbours receive an edge; the state after `v` is the residual
//! degree vector of the later vertices, which is what the memo table is keyed on.

use std::collections::HashMap;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, EdgePair, GraphKey, SimpleGraph};

/// An exact count of graphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RegularCount(pub BigUint);

impl Serialize for RegularCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RegularCount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map(Self).map_err(serde::de::Error::custom)
    }
}

impl RegularCount {
    pub fn zero() -> Self {
        Self(BigUint::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for RegularCount {
    fn from(x: u64) -> Self {
        Self(BigUint::from(x))
    }
}

impl From<BigUint> for RegularCount {
    fn from(x: BigUint) -> Self {
        Self(x)
    }
}

impl fmt::Display for RegularCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

struct Counter<'a> {
    host: &'a SimpleGraph,
    memo: HashMap<Vec<u8>, BigUint>,
}

impl Counter<'_> {
    fn count(&mut self, v: usize, residual: &mut [u8]) -> BigUint {
        let n = self.host.order();
        if v == n {
            return BigUint::one();
        }
        let key = residual[v..].to_vec();
        if let Some(c) = self.memo.get(&key) {
            return c.clone();
        }
        let need = residual[v] as usize;
        let cands: Vec<usize> =
            self.host.neighbors(v).filter(|&w| w > v && residual[w] > 0).collect();
        let mut total = BigUint::zero();
        if need <= cands.len() {
            residual[v] = 0;
            for_each_combination(&cands, need, &mut |chosen| {
                for &w in chosen {
                    residual[w] -= 1;
                }
                if feasible(self.host, v + 1, residual) {
                    total += self.count(v + 1, residual);
                }
                for &w in chosen {
                    residual[w] += 1;
                }
            });
            residual[v] = need as u8;
        }
        self.memo.insert(key, total.clone());
        total
    }
}

/// Cheap necessary conditions on the residual instance from vertex `from` on.
fn feasible(host: &SimpleGraph, from: usize, residual: &[u8]) -> bool {
    let n = host.order();
    let mut sum = 0usize;
    for w in from..n {
        let r = residual[w] as usize;
        if r == 0 {
            continue;
        }
        sum += r;
        let avail = host.neighbors(w).filter(|&x| x >= from && residual[x] > 0).count();
        if r > avail {
            return false;
        }
    }
    sum % 2 == 0
}

fn for_each_combination(items: &[usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(items: &[usize], k: usize, start: usize, buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if buf.len() == k {
            f(buf);
            return;
        }
        let left = k - buf.len();
        for i in start..=items.len() - left {
            buf.push(items[i]);
            rec(items, k, i + 1, buf, f);
            buf.pop();
        }
    }
    if k <= items.len() {
        rec(items, k, 0, &mut Vec::with_capacity(k), f);
    }
}

fn check_target(host: &SimpleGraph, target: &[usize]) -> Result<()> {
    if target.len() != host.order() {
        return Err(Error::SizeMismatch { left: host.order(), right: target.len() });
    }
    if target.iter().any(|&t| t > u8::MAX as usize) {
        return Err(Error::Capacity("degree targets above 255".into()));
    }
    Ok(())
}

/// Number of spanning subgraphs of `host` whose degree sequence is `target`.
pub fn count_degree_sequence(host: &SimpleGraph, target: &[usize]) -> Result<RegularCount> {
    check_target(host, target)?;
    let mut residual: Vec<u8> = target.iter().map(|&t| t as u8).collect();
    if !feasible(host, 0, &residual) {
        return Ok(RegularCount::zero());
    }
    let mut c = Counter { host, memo: HashMap::new() };
    Ok(RegularCount(c.count(0, &mut residual)))
}

/// `|K_d(F)|`: the number of `d`-regular spanning subgraphs of `f`.
pub fn count_regular_spanning_subgraphs(f: &SimpleGraph, d: usize) -> RegularCount {
    if d >= 256 || (d * f.order()) % 2 == 1 {
        return RegularCount::zero();
    }
    count_degree_sequence(f, &vec![d; f.order()]).expect("uniform target is well-formed")
}

/// `|{K ∈ K_d(F) : e ∈ K}|`.
pub fn count_with_edge(f: &SimpleGraph, d: usize, e: EdgePair) -> Result<RegularCount> {
    if !f.has_edge(e) {
        return Err(Error::MissingEdge(e));
    }
    if d == 0 {
        return Ok(RegularCount::zero());
    }
    let host = f.without_edge(e)?;
    let mut target = vec![d; f.order()];
    target[e.u()] -= 1;
    target[e.v()] -= 1;
    count_degree_sequence(&host, &target)
}

fn extension_target(f: &SimpleGraph, d: usize) -> Option<Vec<usize>> {
    (0..f.order()).map(|v| d.checked_sub(f.degree(v))).collect()
}

/// `|{K ∈ K_d(n) : F ⊆ K}|`.
pub fn count_extensions(f: &SimpleGraph, d: usize) -> RegularCount {
    match extension_target(f, d) {
        None => RegularCount::zero(),
        Some(t) => count_degree_sequence(&f.complement(), &t).expect("well-formed target"),
    }
}

/// `|{K ∈ K_d(n) : F + e ⊆ K}|` for a non-edge `e` of `F`.
pub fn count_extensions_with_edge(f: &SimpleGraph, d: usize, e: EdgePair) -> Result<RegularCount> {
    if f.has_edge(e) {
        return Err(Error::UnexpectedEdge(e));
    }
    Ok(count_extensions(&f.with_edge(e)?, d))
}

/// Enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Largest vertex count accepted by the enumerators.
    pub max_vertices: usize,
    /// Hard cap on the number of graphs an enumeration may return.
    pub max_results: usize,
    /// Entry cap of the shared count cache.
    pub cache_capacity: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { max_vertices: 16, max_results: 20_000_000, cache_capacity: 1 << 16 }
    }
}

/// Calls `emit` with the edge list of every spanning subgraph of `host`
/// realising `target`, in lexicographic order of the choices.
fn enumerate_raw(
    host: &SimpleGraph,
    target: &[usize],
    limit: usize,
    emit: &mut dyn FnMut(&[EdgePair]),
) -> Result<()> {
    check_target(host, target)?;
    let mut residual: Vec<u8> = target.iter().map(|&t| t as u8).collect();
    if !feasible(host, 0, &residual) {
        return Ok(());
    }
    let mut emitted = 0usize;
    let mut edges = Vec::new();
    let mut overflow = false;
    rec_enum(host, 0, &mut residual, &mut edges, &mut |es| {
        emitted += 1;
        if emitted > limit {
            overflow = true;
            return false;
        }
        emit(es);
        true
    });
    if overflow {
        return Err(Error::Capacity(format!("enumeration exceeds {limit} graphs")));
    }
    Ok(())
}

fn rec_enum(
    host: &SimpleGraph,
    v: usize,
    residual: &mut [u8],
    edges: &mut Vec<EdgePair>,
    emit: &mut dyn FnMut(&[EdgePair]) -> bool,
) -> bool {
    let n = host.order();
    if v == n {
        return emit(edges);
    }
    let need = residual[v] as usize;
    let cands: Vec<usize> = host.neighbors(v).filter(|&w| w > v && residual[w] > 0).collect();
    if need > cands.len() {
        return true;
    }
    let mut go_on = true;
    residual[v] = 0;
    for_each_combination(&cands, need, &mut |chosen| {
        if !go_on {
            return;
        }
        for &w in chosen {
            residual[w] -= 1;
            edges.push(EdgePair::of(v, w));
        }
        if feasible(host, v + 1, residual) {
            go_on = rec_enum(host, v + 1, residual, edges, emit);
        }
        for &w in chosen {
            residual[w] += 1;
            edges.pop();
        }
    });
    residual[v] = need as u8;
    go_on
}

/// All of `K_d(host)`, sorted by canonical key.
pub fn enumerate_regular(host: &SimpleGraph, d: usize, cfg: &OracleConfig) -> Result<Vec<SimpleGraph>> {
    let n = host.order();
    if n > cfg.max_vertices {
        return Err(Error::Capacity(format!("enumeration limited to n <= {}", cfg.max_vertices)));
    }
    let mut out = Vec::new();
    if d < 256 && (d * n) % 2 == 0 {
        enumerate_raw(host, &vec![d; n], cfg.max_results, &mut |es| {
            out.push(SimpleGraph::from_pairs(n, es.iter().copied()).expect("edges in range"));
        })?;
    }
    out.sort();
    Ok(out)
}

/// All `K ∈ K_d(n)` with `F ⊆ K`, sorted by canonical key.
pub fn enumerate_extensions(f: &SimpleGraph, d: usize, cfg: &OracleConfig) -> Result<Vec<SimpleGraph>> {
    let Some(target) = extension_target(f, d) else { return Ok(Vec::new()) };
    let mut rest = Vec::new();
    if f.order() > cfg.max_vertices {
        return Err(Error::Capacity(format!("enumeration limited to n <= {}", cfg.max_vertices)));
    }
    enumerate_raw(&f.complement(), &target, cfg.max_results, &mut |es| {
        let mut k = f.clone();
        for &e in es {
            k.add_edge(e).expect("edges in range");
        }
        rest.push(k);
    })?;
    rest.sort();
    Ok(rest)
}

fn masks_of(host: &SimpleGraph, target: &[usize], base: u128, cfg: &OracleConfig) -> Result<Vec<u128>> {
    let n = host.order();
    if pair_count(n) > 128 || n > cfg.max_vertices {
        return Err(Error::Capacity(format!("edge masks need n <= 16, got n = {n}")));
    }
    let mut out = Vec::new();
    enumerate_raw(host, target, cfg.max_results, &mut |es| {
        out.push(es.iter().fold(base, |m, e| m | 1u128 << e.index(n)));
    })?;
    out.sort_unstable();
    Ok(out)
}

/// An explicit family of `d`-regular graphs stored as edge masks, with
/// per-pair tallies kept in sync under restriction. Backs the fast process
/// simulations for `n <= 16`.
#[derive(Debug, Clone)]
pub struct RegularFamily {
    n: usize,
    members: Vec<u128>,
    tally: Vec<u64>,
}

impl RegularFamily {
    fn from_masks(n: usize, members: Vec<u128>) -> Self {
        let mut tally = vec![0u64; pair_count(n)];
        for &m in &members {
            let mut rest = m;
            while rest != 0 {
                tally[rest.trailing_zeros() as usize] += 1;
                rest &= rest - 1;
            }
        }
        Self { n, members, tally }
    }

    /// `K_d(host)`.
    pub fn spanning(host: &SimpleGraph, d: usize, cfg: &OracleConfig) -> Result<Self> {
        let n = host.order();
        if (d * n) % 2 == 1 || d >= 256 {
            return Ok(Self::from_masks(n, Vec::new()));
        }
        Ok(Self::from_masks(n, masks_of(host, &vec![d; n], 0, cfg)?))
    }

    /// `{K ∈ K_d(n) : F ⊆ K}`.
    pub fn extensions(f: &SimpleGraph, d: usize, cfg: &OracleConfig) -> Result<Self> {
        let n = f.order();
        let Some(target) = extension_target(f, d) else { return Ok(Self::from_masks(n, Vec::new())) };
        let base = f.to_mask().ok_or_else(|| Error::Capacity("edge masks need n <= 16".into()))?;
        Ok(Self::from_masks(n, masks_of(&f.complement(), &target, base, cfg)?))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members containing `e`.
    pub fn containing(&self, e: EdgePair) -> u64 {
        self.tally[e.index(self.n)]
    }

    /// Members avoiding `e`.
    pub fn avoiding(&self, e: EdgePair) -> u64 {
        self.members.len() as u64 - self.containing(e)
    }

    fn retain(&mut self, keep: impl Fn(u128) -> bool) {
        let tally = &mut self.tally;
        self.members.retain(|&m| {
            let k = keep(m);
            if !k {
                let mut rest = m;
                while rest != 0 {
                    tally[rest.trailing_zeros() as usize] -= 1;
                    rest &= rest - 1;
                }
            }
            k
        });
    }

    /// Drops members containing `e` (host loses `e`).
    pub fn forbid(&mut self, e: EdgePair) {
        let bit = 1u128 << e.index(self.n);
        self.retain(|m| m & bit == 0);
    }

    /// Drops members avoiding `e` (`e` becomes mandatory).
    pub fn require(&mut self, e: EdgePair) {
        let bit = 1u128 << e.index(self.n);
        self.retain(|m| m & bit != 0);
    }

    pub fn masks(&self) -> &[u128] {
        &self.members
    }

    pub fn graphs(&self) -> impl Iterator<Item = SimpleGraph> + '_ {
        self.members.iter().map(move |&m| SimpleGraph::from_mask(self.n, m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Query {
    Spanning,
    WithEdge(EdgePair),
    Extensions,
}

/// Cache hit statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// Count oracle with a bounded LRU cache shared across threads.
pub struct Oracle {
    cfg: OracleConfig,
    cache: Mutex<(LruCache<(GraphKey, usize, Query), RegularCount>, CacheStats)>,
    families: Mutex<HashMap<(usize, usize), Arc<RegularFamily>>>,
}

impl Oracle {
    pub fn new(cfg: OracleConfig) -> Self {
        let cap = NonZeroUsize::new(cfg.cache_capacity.max(1)).expect("nonzero");
        Self {
            cfg,
            cache: Mutex::new((LruCache::new(cap), CacheStats::default())),
            families: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &OracleConfig {
        &self.cfg
    }

    pub fn stats(&self) -> CacheStats {
        self.cache.lock().expect("cache lock").1
    }

    fn cached(&self, f: &SimpleGraph, d: usize, q: Query, compute: impl FnOnce() -> Result<RegularCount>) -> Result<RegularCount> {
        let key = (f.canonical_key(), d, q);
        {
            let mut guard = self.cache.lock().expect("cache lock");
            if let Some(c) = guard.0.get(&key).cloned() {
                guard.1.hits += 1;
                return Ok(c);
            }
            guard.1.misses += 1;
        }
        let c = compute()?;
        self.cache.lock().expect("cache lock").0.put(key, c.clone());
        Ok(c)
    }

    pub fn count_regular(&self, f: &SimpleGraph, d: usize) -> RegularCount {
        self.cached(f, d, Query::Spanning, || Ok(count_regular_spanning_subgraphs(f, d)))
            .expect("infallible")
    }

    pub fn count_with_edge(&self, f: &SimpleGraph, d: usize, e: EdgePair) -> Result<RegularCount> {
        self.cached(f, d, Query::WithEdge(e), || count_with_edge(f, d, e))
    }

    pub fn count_extensions(&self, f: &SimpleGraph, d: usize) -> RegularCount {
        self.cached(f, d, Query::Extensions, || Ok(count_extensions(f, d))).expect("infallible")
    }

    /// `K_d(n)` as a shared mask family, built once per `(n, d)`.
    pub fn complete_family(&self, n: usize, d: usize) -> Result<Arc<RegularFamily>> {
        if let Some(f) = self.families.lock().expect("family lock").get(&(n, d)) {
            return Ok(f.clone());
        }
        let fam = Arc::new(RegularFamily::spanning(&SimpleGraph::complete(n), d, &self.cfg)?);
        self.families.lock().expect("family lock").insert((n, d), fam.clone());
        Ok(fam)
    }
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new(OracleConfig::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over all edge subsets; independent of the DP.
    fn brute(host: &SimpleGraph, d: usize) -> u64 {
        let edges: Vec<EdgePair> = host.edges().collect();
        let n = host.order();
        let mut count = 0;
        for mask in 0u64..(1 << edges.len()) {
            let mut deg = vec![0usize; n];
            for (i, e) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    deg[e.u()] += 1;
                    deg[e.v()] += 1;
                }
            }
            if deg.iter().all(|&x| x == d) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn small_complete_counts() {
        let c = |n, d| count_regular_spanning_subgraphs(&SimpleGraph::complete(n), d).to_u64().unwrap();
        assert_eq!(c(5, 2), 12);
        assert_eq!(c(6, 3), 70);
        assert_eq!(c(4, 1), 3);
        assert_eq!(c(6, 2), 70);
        assert_eq!(c(5, 3), 0);
        assert_eq!(c(7, 0), 1);
        assert_eq!(c(6, 5), 1);
        // Labeled cubic graphs on eight vertices.
        assert_eq!(c(8, 3), 19355);
    }

    #[test]
    fn dp_matches_brute_force_on_sparse_hosts() {
        let hosts = [
            "n=6;edges=1-2,1-3,1-4,2-3,2-5,3-6,4-5,4-6,5-6,1-6,2-4",
            "n=6;edges=1-2,2-3,3-4,4-5,5-6,1-6,1-4,2-5,3-6",
            "n=5;edges=1-2,2-3,3-4,4-5,1-5,1-3,2-4",
        ];
        for h in hosts {
            let g: SimpleGraph = h.parse().unwrap();
            for d in 0..4 {
                assert_eq!(count_regular_spanning_subgraphs(&g, d).to_u64().unwrap(), brute(&g, d), "{h} d={d}");
            }
        }
    }

    #[test]
    fn edge_split_identity() {
        let k6 = SimpleGraph::complete(6);
        let e = EdgePair::new(0, 1).unwrap();
        let with = count_with_edge(&k6, 3, e).unwrap();
        let without = count_regular_spanning_subgraphs(&k6.without_edge(e).unwrap(), 3);
        assert_eq!(with.0 + without.0, BigUint::from(70u32));
        assert!(count_with_edge(&k6.without_edge(e).unwrap(), 3, e).is_err());
    }

    #[test]
    fn extensions_agree_with_complement_duality() {
        let f: SimpleGraph = "n=6;edges=1-2,3-4".parse().unwrap();
        let ext = count_extensions(&f, 3);
        let fam = enumerate_extensions(&f, 3, &OracleConfig::default()).unwrap();
        assert_eq!(ext.to_u64().unwrap(), fam.len() as u64);
        assert!(fam.iter().all(|k| f.is_subgraph_of(k) && k.is_regular(3)));
        let e = EdgePair::new(0, 1).unwrap();
        assert!(count_extensions_with_edge(&f, 3, e).is_err());
    }

    #[test]
    fn enumeration_matches_count_and_is_sorted() {
        let cfg = OracleConfig::default();
        let all = enumerate_regular(&SimpleGraph::complete(6), 3, &cfg).unwrap();
        assert_eq!(all.len(), 70);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|k| k.is_regular(3)));
        let tight = OracleConfig { max_results: 10, ..cfg };
        assert!(matches!(enumerate_regular(&SimpleGraph::complete(6), 3, &tight), Err(Error::Capacity(_))));
    }

    #[test]
    fn family_tallies_track_restriction() {
        let cfg = OracleConfig::default();
        let mut fam = RegularFamily::spanning(&SimpleGraph::complete(6), 3, &cfg).unwrap();
        let mut host = SimpleGraph::complete(6);
        for (a, b) in [(0, 1), (2, 3), (0, 5)] {
            let e = EdgePair::new(a, b).unwrap();
            fam.forbid(e);
            host.remove_edge(e).unwrap();
            assert_eq!(fam.len() as u64, count_regular_spanning_subgraphs(&host, 3).to_u64().unwrap());
            for f in host.edges() {
                assert_eq!(fam.containing(f), count_with_edge(&host, 3, f).unwrap().to_u64().unwrap());
            }
        }
    }

    #[test]
    fn oracle_cache_hits() {
        let o = Oracle::default();
        let k5 = SimpleGraph::complete(5);
        assert_eq!(o.count_regular(&k5, 2).to_u64(), Some(12));
        assert_eq!(o.count_regular(&k5, 2).to_u64(), Some(12));
        assert_eq!(o.stats(), CacheStats { hits: 1, misses: 1 });
    }
}
