//! Exact check of the identity that moves a property of a planted pair
//! `(F, K)`, with `F` drawn from `F(n, d, dn/2 + m)` around a uniform `K`, to
//! most regular subgraphs `K'` of a fixed `F`:
//!
//! `P((F,K) ∉ P) = Σ_F Σ_{K' ∈ K_d(F)} 1[(F,K') ∉ P] / (|K_d(n)| · C(C(n,2) - dn/2, m))`.
//!
//! The left side enumerates `(K, S)` with `S` a set of `m` non-edges of `K`;
//! the right side enumerates graphs `F` and their regular spanning subgraphs.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{for_each_edge_subset, pair_count, EdgePair, SimpleGraph};
use crate::oracle::{enumerate_regular, OracleConfig};

use super::ratio_str;

/// Largest number of graphs enumerated on either side.
pub const TRANSLATION_LIMIT: u128 = 5_000_000;

/// A property of a pair `(F, K)` with `K ⊆ F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairPredicate {
    Always,
    Never,
    /// `e ∈ K`.
    KContains { edge: EdgePair },
    /// `F \ K` is a matching.
    ExtraIsMatching,
    /// `F \ K` has no edge inside the neighbourhood of any vertex of `K`,
    /// i.e. no `K`-path of length 2 is closed by an extra edge.
    NoClosedCherry,
    /// Every vertex has `F`-degree at most `bound`.
    MaxDegreeAtMost { bound: usize },
}

impl PairPredicate {
    pub fn holds(&self, f: &SimpleGraph, k: &SimpleGraph) -> bool {
        match self {
            PairPredicate::Always => true,
            PairPredicate::Never => false,
            PairPredicate::KContains { edge } => k.has_edge(*edge),
            PairPredicate::ExtraIsMatching => {
                let extra = f.difference(k).expect("same order");
                extra.max_degree() <= 1
            }
            PairPredicate::NoClosedCherry => {
                let extra = f.difference(k).expect("same order");
                (0..k.order()).all(|v| extra.internal_edges(&k.neighbor_set(v)) == 0)
            }
            PairPredicate::MaxDegreeAtMost { bound } => f.max_degree() <= *bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMass {
    pub threshold: f64,
    /// Probability under `F(n, d, dn/2 + m)` that the bad proportion of
    /// `K_d(F)` exceeds `threshold`.
    pub mass_above: f64,
    /// Fraction of the support (unweighted) with the same property.
    pub support_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub predicate: PairPredicate,
    /// Number of pairs `(K, S)` with a violated predicate.
    pub planted_bad: u64,
    /// The same count taken over `(F, K')`.
    pub translated_bad: u64,
    #[serde(with = "ratio_str")]
    pub planted_probability: BigRational,
    #[serde(with = "ratio_str")]
    pub translated_probability: BigRational,
    /// Number of graphs `F` with positive probability.
    pub support: usize,
    pub thresholds: Vec<ThresholdMass>,
    pub identity_holds: bool,
}

/// Both sides of the identity by full enumeration, and the law-weighted
/// fraction of `F` whose bad proportion exceeds each threshold.
pub fn translation_check(
    n: usize,
    d: usize,
    m: usize,
    predicate: &PairPredicate,
    thresholds: &[f64],
    ceiling: usize,
) -> Result<TranslationReport> {
    if n > ceiling {
        return Err(Error::Capacity(format!("translation check limited to n <= {ceiling}, got n = {n}")));
    }
    if d >= n || (d * n) % 2 == 1 {
        return Err(Error::InvalidParams(format!("no {d}-regular graphs on {n} vertices")));
    }
    let pairs = pair_count(n);
    let half = d * n / 2;
    let free = pairs - half;
    if m > free {
        return Err(Error::InvalidParams(format!("m = {m} exceeds C(n,2) - dn/2 = {free}")));
    }
    let graphs_f = binomial(BigUint::from(pairs), BigUint::from(half + m));
    if graphs_f > BigUint::from(TRANSLATION_LIMIT) {
        return Err(Error::Capacity(format!("{graphs_f} candidate graphs F")));
    }
    let cfg = OracleConfig::default();
    let family = enumerate_regular(&SimpleGraph::complete(n), d, &cfg)?;
    let denom = BigUint::from(family.len()) * binomial(BigUint::from(free), BigUint::from(m));
    let ratio = |c: u64| BigRational::new(BigInt::from(c), BigInt::from(denom.clone()));

    // Planted side: K, then every m-set of its non-edges.
    let mut planted_bad = 0u64;
    for k in &family {
        let others: Vec<EdgePair> = k.complement().edges().collect();
        for_each_combination(others.len(), m, &mut |idx| {
            let mut f = k.clone();
            for &i in idx {
                f.add_edge(others[i]).expect("non-edge");
            }
            if !predicate.holds(&f, k) {
                planted_bad += 1;
            }
        });
    }

    // Translated side: F, then its regular spanning subgraphs.
    let mut translated_bad = 0u64;
    let mut per_f: Vec<(u64, u64)> = Vec::new();
    let mut failure = None;
    for_each_edge_subset(n, half + m, &mut |f| {
        if failure.is_some() {
            return;
        }
        match enumerate_regular(f, d, &cfg) {
            Ok(sub) if !sub.is_empty() => {
                let bad = sub.iter().filter(|k| !predicate.holds(f, k)).count() as u64;
                translated_bad += bad;
                per_f.push((bad, sub.len() as u64));
            }
            Ok(_) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let total_weight: u64 = per_f.iter().map(|p| p.1).sum();
    let thresholds = thresholds
        .iter()
        .map(|&t| {
            let above: Vec<_> = per_f.iter().filter(|(b, k)| *b as f64 > t * *k as f64).collect();
            ThresholdMass {
                threshold: t,
                mass_above: above.iter().map(|p| p.1).sum::<u64>() as f64 / total_weight as f64,
                support_fraction: above.len() as f64 / per_f.len() as f64,
            }
        })
        .collect();
    let planted_probability = ratio(planted_bad);
    let translated_probability = ratio(translated_bad);
    let identity_holds = planted_probability == translated_probability;
    Ok(TranslationReport {
        n,
        d,
        m,
        predicate: predicate.clone(),
        planted_bad,
        translated_bad,
        planted_probability,
        translated_probability,
        support: per_f.len(),
        thresholds,
        identity_holds,
    })
}

impl TranslationReport {
    pub fn probability_f64(&self) -> f64 {
        self.planted_probability.to_f64().unwrap_or(f64::NAN)
    }
}

fn for_each_combination(len: usize, size: usize, visit: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, len: usize, size: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            visit(cur);
            return;
        }
        for i in start..=len - (size - cur.len()) {
            cur.push(i);
            go(i + 1, len, size, cur, visit);
            cur.pop();
        }
    }
    if size <= len {
        go(0, len, size, &mut Vec::with_capacity(size), visit);
    }
}
