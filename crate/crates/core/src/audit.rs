//! Finite checkers for the pseudorandom properties of a pair `K ⊆ F`. Every
//! checker reports a signed margin (negative means violated) together with the
//! instance achieving the worst margin, so that desk-scale runs stay
//! informative when the asymptotic thresholds are vacuous.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, Vertex, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    DegreeBand,
    FkDegrees,
    NeighborhoodSums,
    ExpansionK,
    ExpansionFk,
    LocalDensity,
    Connection,
    UvDistribution,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::DegreeBand,
        Property::FkDegrees,
        Property::NeighborhoodSums,
        Property::ExpansionK,
        Property::ExpansionFk,
        Property::LocalDensity,
        Property::Connection,
        Property::UvDistribution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::DegreeBand => "degree_band",
            Property::FkDegrees => "fk_degrees",
            Property::NeighborhoodSums => "neighborhood_sums",
            Property::ExpansionK => "expansion_k",
            Property::ExpansionFk => "expansion_fk",
            Property::LocalDensity => "local_density",
            Property::Connection => "connection",
            Property::UvDistribution => "uv_distribution",
        }
    }
}

impl std::str::FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown property `{s}`")))
    }
}

/// How many instances a checker looked at, and how they were chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Coverage {
    /// Every instance of the property (vertices, or an explicit list).
    Complete { instances: usize },
    /// All sets up to `max_size`, plus `sampled` random larger ones.
    Exhaustive { instances: usize, max_size: usize, sampled: usize, seed: u64 },
    Sampled { instances: usize, seed: u64 },
}

impl Coverage {
    pub fn instances(&self) -> usize {
        match *self {
            Coverage::Complete { instances }
            | Coverage::Exhaustive { instances, .. }
            | Coverage::Sampled { instances, .. } => instances,
        }
    }
}

/// The instance achieving the worst margin. Vertices are 1-based labels, as
/// in graph literals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Vertex { vertex: Vertex },
    Set { set: Vec<Vertex> },
    /// A set `U` together with the small set `U'` certifying it.
    Covered { set: Vec<Vertex>, cover: Vec<Vertex> },
    Pair { left: Vec<Vertex>, right: Vec<Vertex> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub params: BTreeMap<String, f64>,
    pub coverage: Coverage,
    pub pass: bool,
    /// `None` when no instance qualified (a vacuous pass).
    pub worst_margin: Option<f64>,
    /// The checked statistic at the witness.
    pub worst_value: Option<f64>,
    pub witness: Option<Witness>,
    /// Parameter constraints of the property that fail at this size.
    pub constraints: Vec<String>,
}

impl PropertyReport {
    /// Rows `(property, n, d, m, worst_margin)` use this.
    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }
}

/// Search limits for the set-quantified properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Sets (or witness sets) up to this size are enumerated exhaustively.
    pub exhaustive_size: usize,
    /// Candidate sets `U ⊆ U' ∪ N(U')` are enumerated when the cover has at
    /// most this many vertices, and sampled otherwise.
    pub cover_bits: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { exhaustive_size: 3, cover_bits: 14, samples: 1000, seed: 0 }
    }
}

struct Worst {
    count: usize,
    margin: Option<f64>,
    value: Option<f64>,
    witness: Option<Witness>,
}

impl Worst {
    fn new() -> Self {
        Self { count: 0, margin: None, value: None, witness: None }
    }

    fn observe(&mut self, margin: f64, value: f64, witness: impl FnOnce() -> Witness) {
        self.count += 1;
        if self.margin.is_none_or(|m| margin < m) {
            self.margin = Some(margin);
            self.value = Some(value);
            self.witness = Some(witness());
        }
    }

    fn finish(
        self,
        property: Property,
        params: BTreeMap<String, f64>,
        coverage: impl FnOnce(usize) -> Coverage,
        constraints: Vec<String>,
    ) -> PropertyReport {
        PropertyReport {
            property,
            params,
            coverage: coverage(self.count),
            pass: self.margin.is_none_or(|m| m >= 0.0),
            worst_margin: self.margin,
            worst_value: self.value,
            witness: self.witness,
            constraints,
        }
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Signed distance of `x` inside `[lo, hi]`.
fn band_margin(x: f64, lo: f64, hi: f64) -> f64 {
    (x - lo).min(hi - x)
}

fn ln(n: usize) -> f64 {
    (n as f64).ln()
}

/// `δ = 2m/n`.
pub fn delta(m: usize, n: usize) -> f64 {
    2.0 * m as f64 / n as f64
}

fn split(f: &SimpleGraph, k: &SimpleGraph) -> Result<SimpleGraph> {
    if f.order() != k.order() {
        return Err(Error::SizeMismatch { left: f.order(), right: k.order() });
    }
    if !k.is_subgraph_of(f) {
        return Err(Error::Precondition("K must be a subgraph of F".into()));
    }
    f.difference(k)
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} = {x} must be positive")))
    }
}

/// Every degree of `F` in `[d + (1-η)δ, d + (1+η)δ]`.
pub fn check_degree_band(f: &SimpleGraph, d: usize, delta: f64, eta: f64) -> PropertyReport {
    let lo = d as f64 + (1.0 - eta) * delta;
    let hi = d as f64 + (1.0 + eta) * delta;
    let mut w = Worst::new();
    for v in 0..f.order() {
        let x = f.degree(v) as f64;
        w.observe(band_margin(x, lo, hi), x, || Witness::Vertex { vertex: v + 1 });
    }
    let p = params(&[("n", f.order() as f64), ("d", d as f64), ("delta", delta), ("eta", eta)]);
    w.finish(Property::DegreeBand, p, |instances| Coverage::Complete { instances }, vec![])
}

/// Every degree of `F \ K` in `(1 ± C'√(ln n / δ))δ`.
pub fn check_fk_degrees(f: &SimpleGraph, k: &SimpleGraph, delta: f64, band_constant: f64) -> Result<PropertyReport> {
    let diff = split(f, k)?;
    positive("delta", delta)?;
    let width = band_constant * (ln(f.order()) / delta).sqrt();
    let (lo, hi) = ((1.0 - width) * delta, (1.0 + width) * delta);
    let mut w = Worst::new();
    for v in 0..f.order() {
        let x = diff.degree(v) as f64;
        w.observe(band_margin(x, lo, hi), x, || Witness::Vertex { vertex: v + 1 });
    }
    let p = params(&[("n", f.order() as f64), ("delta", delta), ("band_constant", band_constant), ("width", width)]);
    Ok(w.finish(Property::FkDegrees, p, |instances| Coverage::Complete { instances }, vec![]))
}

/// `Σ_{u ∈ N_{F\K}(v)} Σ_{u' ∈ N_K(u)} d_{F\K}(u')`, with `diff = F \ K`.
pub fn neighborhood_double_sum(diff: &SimpleGraph, k: &SimpleGraph, v: Vertex) -> u64 {
    diff.neighbors(v)
        .map(|u| k.neighbors(u).map(|w| diff.degree(w) as u64).sum::<u64>())
        .sum()
}

/// The double sum at every `v` in `(1 ± t)·d_{F\K}(v)·δd`, with `t = 2/δ`
/// unless `tol` is given.
pub fn check_neighborhood_sums(
    f: &SimpleGraph,
    k: &SimpleGraph,
    delta: f64,
    d: usize,
    tol: Option<f64>,
) -> Result<PropertyReport> {
    let diff = split(f, k)?;
    let t = match tol {
        Some(t) => t,
        None => {
            positive("delta", delta)?;
            2.0 / delta
        }
    };
    let mut w = Worst::new();
    for v in 0..f.order() {
        let centre = diff.degree(v) as f64 * delta * d as f64;
        let x = neighborhood_double_sum(&diff, k, v) as f64;
        w.observe(band_margin(x, (1.0 - t) * centre, (1.0 + t) * centre), x, || Witness::Vertex { vertex: v + 1 });
    }
    let p = params(&[("n", f.order() as f64), ("d", d as f64), ("delta", delta), ("tol", t)]);
    Ok(w.finish(Property::NeighborhoodSums, p, |instances| Coverage::Complete { instances }, vec![]))
}

/// `|E_{≥2,H}(U)| + e_H(U)`.
pub fn expansion_statistic(h: &SimpleGraph, u: &VertexSet) -> usize {
    h.multi_covered_edges(u).len() + h.internal_edges(u)
}

/// Constraints on `λ` shared by the expansion and connection properties.
fn lambda_constraints(n: usize, lambda: f64, delta: f64) -> Vec<String> {
    let l = ln(n);
    let mut out = Vec::new();
    if lambda < l.powi(-3) {
        out.push(format!("lambda = {lambda} is below ln^-3 n = {:.4}", l.powi(-3)));
    }
    if lambda >= 1.0 {
        out.push(format!("lambda = {lambda} is not small"));
    }
    if lambda * delta < l {
        out.push(format!("lambda * delta = {:.4} is below ln n = {l:.4}", lambda * delta));
    }
    out
}

fn size_regime(out: &mut Vec<String>, what: &str, limit: f64) {
    if limit < 1.0 {
        out.push(format!("{what} = {limit:.3e} admits no non-empty set; checking every witnessed set instead"));
    }
}

/// One side of the expansion check: sets `U` with a witness `U'`,
/// `|U'| <= 4|U|/spread` and `U ⊆ U' ∪ N_cover(U')`, must satisfy
/// `stat(U) <= per_vertex·|U|`. Witnesses are enumerated first and `U` is
/// grown inside `U' ∪ N_cover(U')`.
struct Expansion<'a> {
    stat: &'a SimpleGraph,
    cover: &'a SimpleGraph,
    spread: f64,
    per_vertex: f64,
    cfg: SearchConfig,
}

impl Expansion<'_> {
    fn run(&self) -> (Worst, usize) {
        let n = self.stat.order();
        let mut worst = Worst::new();
        let mut seen: HashSet<Vec<Vertex>> = HashSet::new();
        let exhaustive = self.cfg.exhaustive_size.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        for size in 1..=exhaustive {
            for_each_subset(n, size, &mut |cover| {
                self.candidates(cover, &mut rng, &mut worst, &mut seen);
            });
        }
        let mut sampled = 0;
        if exhaustive < n {
            let all: Vec<Vertex> = (0..n).collect();
            for _ in 0..self.cfg.samples {
                let size = rng.random_range(exhaustive + 1..=n);
                let mut pick = all.clone();
                pick.shuffle(&mut rng);
                pick.truncate(size);
                pick.sort_unstable();
                sampled += 1;
                self.candidates(&pick, &mut rng, &mut worst, &mut seen);
            }
        }
        (worst, sampled)
    }

    fn candidates(&self, cover: &[Vertex], rng: &mut ChaCha8Rng, worst: &mut Worst, seen: &mut HashSet<Vec<Vertex>>) {
        let n = self.stat.order();
        let c = VertexSet::from_vertices(n, cover.iter().copied()).expect("in range");
        let reach: Vec<Vertex> = c.union(&self.cover.neighborhood(&c)).iter().collect();
        // |U'| <= 4|U|/spread.
        let min_size = ((self.spread * cover.len() as f64 / 4.0).ceil() as usize).max(1);
        if min_size > reach.len() {
            return;
        }
        let mut visit = |u: Vec<Vertex>| {
            if !seen.insert(u.clone()) {
                return;
            }
            let set = VertexSet::from_vertices(n, u.iter().copied()).expect("in range");
            let x = expansion_statistic(self.stat, &set) as f64;
            let margin = self.per_vertex * u.len() as f64 - x;
            worst.observe(margin, x, || Witness::Covered { set: labels(&u), cover: labels(cover) });
        };
        if reach.len() <= self.cfg.cover_bits {
            for mask in 1u64..(1u64 << reach.len()) {
                if (mask.count_ones() as usize) < min_size {
                    continue;
                }
                visit(reach.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect());
            }
        } else {
            for _ in 0..self.cfg.samples.max(1) {
                let size = rng.random_range(min_size..=reach.len());
                let mut pick = reach.clone();
                pick.shuffle(rng);
                pick.truncate(size);
                pick.sort_unstable();
                visit(pick);
            }
        }
    }
}

fn for_each_subset(n: usize, size: usize, visit: &mut dyn FnMut(&[Vertex])) {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<Vertex>, visit: &mut dyn FnMut(&[Vertex])) {
        if cur.len() == size {
            visit(cur);
            return;
        }
        for v in start..=n - (size - cur.len()) {
            cur.push(v);
            go(v + 1, n, size, cur, visit);
            cur.pop();
        }
    }
    if size <= n {
        go(0, n, size, &mut Vec::with_capacity(size), visit);
    }
}

fn expansion_coverage(cfg: &SearchConfig, sampled: usize) -> impl FnOnce(usize) -> Coverage {
    let (max_size, seed) = (cfg.exhaustive_size, cfg.seed);
    move |instances| Coverage::Exhaustive { instances, max_size, sampled, seed }
}

/// `|E_{≥2,K}(U)| + e_K(U) <= (λ/ln n)·d|U|` (or `λd|U|` without the log
/// divisor) for every `U` with a witness `|U'| <= 4|U|/δ`,
/// `U ⊆ U' ∪ N_{F\K}(U')`.
pub fn check_expansion_k(
    f: &SimpleGraph,
    k: &SimpleGraph,
    lambda: f64,
    d: usize,
    delta: f64,
    log_divisor: bool,
    cfg: &SearchConfig,
) -> Result<PropertyReport> {
    let diff = split(f, k)?;
    positive("delta", delta)?;
    let n = f.order();
    let scale = if log_divisor { lambda / ln(n) } else { lambda };
    let exp = Expansion { stat: k, cover: &diff, spread: delta, per_vertex: scale * d as f64, cfg: *cfg };
    let (worst, sampled) = exp.run();
    let mut constraints = lambda_constraints(n, lambda, delta);
    let limit = lambda * n as f64 / (1e6 * d as f64 * if log_divisor { ln(n) } else { 1.0 });
    size_regime(&mut constraints, "size limit on U", limit);
    let p = params(&[
        ("n", n as f64),
        ("d", d as f64),
        ("delta", delta),
        ("lambda", lambda),
        ("log_divisor", f64::from(u8::from(log_divisor))),
    ]);
    Ok(worst.finish(Property::ExpansionK, p, expansion_coverage(cfg, sampled), constraints))
}

/// The same with the roles of `K` and `F \ K` exchanged: bound
/// `(λ/ln n)·δ|U|`, witness `|U'| <= 4|U|/d` with `U ⊆ U' ∪ N_K(U')`.
pub fn check_expansion_fk(
    f: &SimpleGraph,
    k: &SimpleGraph,
    lambda: f64,
    delta: f64,
    d: usize,
    cfg: &SearchConfig,
) -> Result<PropertyReport> {
    let diff = split(f, k)?;
    let n = f.order();
    if d == 0 {
        return Err(Error::InvalidParams("d must be positive".into()));
    }
    let exp = Expansion { stat: &diff, cover: k, spread: d as f64, per_vertex: lambda / ln(n) * delta, cfg: *cfg };
    let (worst, sampled) = exp.run();
    let mut constraints = lambda_constraints(n, lambda, delta);
    size_regime(&mut constraints, "size limit on U", lambda * n as f64 / (100.0 * delta * ln(n)));
    let p = params(&[("n", n as f64), ("d", d as f64), ("delta", delta), ("lambda", lambda)]);
    Ok(worst.finish(Property::ExpansionFk, p, expansion_coverage(cfg, sampled), constraints))
}

/// Caps of the local density property; the defaults are 10 and `100 ln n`
/// for the degree and count caps and `100 ln n` (at most `n`) for `|U|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityCaps {
    pub size_cap: usize,
    pub degree_cap: usize,
    pub count_cap: f64,
}

impl DensityCaps {
    pub fn standard(n: usize) -> Self {
        let l = 100.0 * ln(n);
        Self { size_cap: (l.floor() as usize).min(n), degree_cap: 10, count_cap: l }
    }
}

/// For `|U| <= size_cap`, at most `count_cap` vertices outside `U` have
/// `degree_cap` or more neighbours in `U`.
pub fn check_local_density(h: &SimpleGraph, caps: DensityCaps, cfg: &SearchConfig) -> PropertyReport {
    let n = h.order();
    let size_cap = caps.size_cap.min(n);
    let mut w = Worst::new();
    let mut eval = |u: &[Vertex]| {
        let set = VertexSet::from_vertices(n, u.iter().copied()).expect("in range");
        let heavy = (0..n).filter(|&v| !set.contains(v) && h.degree_into(v, &set) >= caps.degree_cap).count() as f64;
        w.observe(caps.count_cap - heavy, heavy, || Witness::Set { set: labels(u) });
    };
    let exhaustive = cfg.exhaustive_size.min(size_cap);
    for size in 0..=exhaustive {
        for_each_subset(n, size, &mut eval);
    }
    let mut sampled = 0;
    if exhaustive < size_cap {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let all: Vec<Vertex> = (0..n).collect();
        for _ in 0..cfg.samples {
            let size = rng.random_range(exhaustive + 1..=size_cap);
            let mut pick = all.clone();
            pick.shuffle(&mut rng);
            pick.truncate(size);
            pick.sort_unstable();
            sampled += 1;
            eval(&pick);
        }
    }
    let p = params(&[
        ("n", n as f64),
        ("size_cap", size_cap as f64),
        ("degree_cap", caps.degree_cap as f64),
        ("count_cap", caps.count_cap),
    ]);
    let (max_size, seed) = (exhaustive, cfg.seed);
    w.finish(Property::LocalDensity, p, |instances| Coverage::Exhaustive { instances, max_size, sampled, seed }, vec![])
}

/// Where the set pairs of [`check_connection`] and [`check_uv_distribution`]
/// come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PairSource {
    /// Every qualifying pair; fails with a capacity error when there are more
    /// than [`PAIR_LIMIT`].
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
    Explicit(Vec<(VertexSet, VertexSet)>),
}

pub const PAIR_LIMIT: u64 = 2_000_000;

fn coverage_of(source: &PairSource) -> impl FnOnce(usize) -> Coverage {
    let seed = match source {
        PairSource::Sampled { seed, .. } => Some(*seed),
        _ => None,
    };
    move |instances| match seed {
        Some(seed) => Coverage::Sampled { instances, seed },
        None => Coverage::Complete { instances },
    }
}

fn to_vec(s: &VertexSet) -> Vec<Vertex> {
    s.iter().map(|v| v + 1).collect()
}

fn labels(vs: &[Vertex]) -> Vec<Vertex> {
    vs.iter().map(|v| v + 1).collect()
}

impl Witness {
    /// The witness sets as 0-based vertex sets on `n` vertices.
    pub fn sets(&self, n: usize) -> Result<Vec<VertexSet>> {
        let set = |vs: &[Vertex]| {
            let zero: Option<Vec<Vertex>> = vs.iter().map(|v| v.checked_sub(1)).collect();
            VertexSet::from_vertices(n, zero.ok_or_else(|| Error::Parse("vertex label 0".into()))?)
        };
        match self {
            Witness::Vertex { vertex } => Ok(vec![set(&[*vertex])?]),
            Witness::Set { set: s } => Ok(vec![set(s)?]),
            Witness::Covered { set: s, cover } => Ok(vec![set(s)?, set(cover)?]),
            Witness::Pair { left, right } => Ok(vec![set(left)?, set(right)?]),
        }
    }
}

/// `⌈λn/10⁸⌉`, at least 1.
pub fn connection_floor(lambda: f64, n: usize) -> usize {
    ((lambda * n as f64 / 1e8).ceil() as usize).max(1)
}

/// `e_{F\K}(U, V) >= (1 - λ)(δ/n)|U||V|` for disjoint `U`, `V` of size at
/// least `size_floor`; the recorded value is `e_{F\K}(U,V)·n/(δ|U||V|)`.
pub fn check_connection(
    f: &SimpleGraph,
    k: &SimpleGraph,
    delta: f64,
    lambda: f64,
    size_floor: usize,
    source: &PairSource,
) -> Result<PropertyReport> {
    let diff = split(f, k)?;
    positive("delta", delta)?;
    let n = f.order();
    let floor = size_floor.max(1);
    let mut w = Worst::new();
    let mut eval = |a: &VertexSet, b: &VertexSet| {
        if a.len() < floor || b.len() < floor || !a.is_disjoint(b) {
            return;
        }
        let ratio = diff.edges_between(a, b) as f64 * n as f64 / (delta * (a.len() * b.len()) as f64);
        w.observe(ratio - (1.0 - lambda), ratio, || Witness::Pair { left: to_vec(a), right: to_vec(b) });
    };
    match source {
        PairSource::Exhaustive => {
            if 3f64.powi(n as i32) > PAIR_LIMIT as f64 {
                return Err(Error::Capacity(format!("3^{n} disjoint set pairs exceed {PAIR_LIMIT}")));
            }
            // Label each vertex 0 (unused), 1 (in U) or 2 (in V).
            let mut labels = vec![0u8; n];
            loop {
                let a = VertexSet::from_vertices(n, (0..n).filter(|&v| labels[v] == 1)).expect("in range");
                let b = VertexSet::from_vertices(n, (0..n).filter(|&v| labels[v] == 2)).expect("in range");
                eval(&a, &b);
                let Some(i) = labels.iter().position(|&l| l < 2) else { break };
                labels[i] += 1;
                labels[..i].iter_mut().for_each(|l| *l = 0);
            }
        }
        PairSource::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            if 2 * floor <= n {
                for _ in 0..*samples {
                    let mut all: Vec<Vertex> = (0..n).collect();
                    all.shuffle(&mut rng);
                    let a_len = rng.random_range(floor..=n - floor);
                    let b_len = rng.random_range(floor..=n - a_len);
                    let a = VertexSet::from_vertices(n, all[..a_len].iter().copied()).expect("in range");
                    let b = VertexSet::from_vertices(n, all[a_len..a_len + b_len].iter().copied()).expect("in range");
                    eval(&a, &b);
                }
            }
        }
        PairSource::Explicit(pairs) => pairs.iter().for_each(|(a, b)| eval(a, b)),
    }
    let constraints = lambda_constraints(n, lambda, delta);
    let p = params(&[("n", n as f64), ("delta", delta), ("lambda", lambda), ("size_floor", floor as f64)]);
    Ok(w.finish(Property::Connection, p, coverage_of(source), constraints))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All subsets of `0..n` of size at least `min`, largest first.
fn large_subsets(n: usize, min: usize) -> Vec<VertexSet> {
    let mut out = Vec::new();
    for size in (min..=n).rev() {
        for_each_subset(n, size, &mut |s| out.push(VertexSet::from_vertices(n, s.iter().copied()).expect("in range")));
    }
    out
}

/// `e_K(U, V) = (1 ± n^{-0.01})(d/n)|U||V|` for all `U`, `V` (not necessarily
/// disjoint) of size at least `n^{0.98}`. The recorded value is the ratio of
/// the two sides.
pub fn check_uv_distribution(k: &SimpleGraph, d: usize, source: &PairSource) -> Result<PropertyReport> {
    if !k.is_regular(d) {
        return Err(Error::Precondition(format!("K is not {d}-regular")));
    }
    let n = k.order();
    let min = ((n as f64).powf(0.98).ceil() as usize).min(n);
    let tol = (n as f64).powf(-0.01);
    let mut w = Worst::new();
    let mut eval = |a: &VertexSet, b: &VertexSet| {
        if a.len() < min || b.len() < min {
            return;
        }
        let ratio = k.edges_between(a, b) as f64 * n as f64 / (d * a.len() * b.len()) as f64;
        w.observe(tol - (ratio - 1.0).abs(), ratio, || Witness::Pair { left: to_vec(a), right: to_vec(b) });
    };
    match source {
        PairSource::Exhaustive => {
            let sets: f64 = (min..=n).map(|s| binomial(n, s)).sum();
            if sets * sets > PAIR_LIMIT as f64 {
                return Err(Error::Capacity(format!("{sets}^2 set pairs exceed {PAIR_LIMIT}")));
            }
            let sets = large_subsets(n, min);
            for a in &sets {
                for b in &sets {
                    eval(a, b);
                }
            }
        }
        PairSource::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut all: Vec<Vertex> = (0..n).collect();
            let mut draw = |rng: &mut ChaCha8Rng| {
                let len = rng.random_range(min..=n);
                all.shuffle(rng);
                VertexSet::from_vertices(n, all[..len].iter().copied()).expect("in range")
            };
            for _ in 0..*samples {
                let a = draw(&mut rng);
                let b = draw(&mut rng);
                eval(&a, &b);
            }
        }
        PairSource::Explicit(pairs) => pairs.iter().for_each(|(a, b)| eval(a, b)),
    }
    let p = params(&[("n", n as f64), ("d", d as f64), ("min_size", min as f64), ("tol", tol)]);
    Ok(w.finish(Property::UvDistribution, p, coverage_of(source), vec![]))
}

/// Smallest integer `ℓ0` with `(δd)^{ℓ0 - 1} >= n`.
pub fn ell0(delta: f64, d: f64, n: usize) -> Result<usize> {
    let base = delta * d;
    if !(base > 1.0 && base.is_finite()) {
        return Err(Error::InvalidParams(format!("need δd > 1, got {base}")));
    }
    let target = n as f64;
    let (mut ell, mut power) = (1usize, 1.0f64);
    while power < target {
        power *= base;
        ell += 1;
    }
    Ok(ell)
}
