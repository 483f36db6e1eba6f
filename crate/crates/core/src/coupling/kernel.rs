//! Exact one-step kernels of the weighted processes and the closed-form laws
//! of their marginals, over rational probabilities.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{for_each_edge_subset, pair_count, EdgePair, GraphKey, SimpleGraph};
use crate::oracle::Oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// From `K_n`, removing edges; weight `|K_d(F - e)|`.
    Delete,
    /// From the empty graph, adding edges; weight `|{K ⊇ F + e}|`.
    Add,
}

/// A probability law on labeled graphs with a common edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionTable {
    pub n: usize,
    pub probs: BTreeMap<GraphKey, BigRational>,
}

impl DistributionTable {
    pub fn point_mass(g: &SimpleGraph) -> Self {
        let mut probs = BTreeMap::new();
        probs.insert(g.canonical_key(), BigRational::one());
        Self { n: g.order(), probs }
    }

    pub fn total(&self) -> BigRational {
        self.probs.values().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn support(&self) -> usize {
        self.probs.len()
    }

    pub fn probability(&self, g: &SimpleGraph) -> BigRational {
        self.probs.get(&g.canonical_key()).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SimpleGraph, &BigRational)> {
        self.probs.iter().map(|(k, p)| (SimpleGraph::from_key(k), p))
    }

    /// `max_F |P(F) - Q(F)|`, exact.
    pub fn max_abs_difference(&self, other: &Self) -> BigRational {
        let mut worst = BigRational::zero();
        for k in self.probs.keys().chain(other.probs.keys()) {
            let a = self.probs.get(k).cloned().unwrap_or_else(BigRational::zero);
            let b = other.probs.get(k).cloned().unwrap_or_else(BigRational::zero);
            let diff = if a > b { a - b } else { b - a };
            if diff > worst {
                worst = diff;
            }
        }
        worst
    }
}

fn big(x: &BigUint) -> BigInt {
    BigInt::from(x.clone())
}

fn check_ceiling(n: usize, ceiling: usize) -> Result<()> {
    if n > ceiling {
        return Err(Error::Capacity(format!("exact laws limited to n <= {ceiling}, got n = {n}")));
    }
    Ok(())
}

/// Pushes `table` through one step of the process.
pub fn exact_kernel_step(table: &DistributionTable, d: usize, dir: Direction, oracle: &Oracle) -> Result<DistributionTable> {
    let mut out: BTreeMap<GraphKey, BigRational> = BTreeMap::new();
    for (f, p) in table.iter() {
        let moves: Vec<(EdgePair, BigUint)> = match dir {
            Direction::Delete => f
                .edges()
                .map(|e| (e, oracle.count_regular(&f.without_edge(e).expect("in range"), d).0))
                .collect(),
            Direction::Add => f
                .complement()
                .edges()
                .map(|e| (e, oracle.count_extensions(&f.with_edge(e).expect("in range"), d).0))
                .collect(),
        };
        let total: BigUint = moves.iter().map(|(_, w)| w).sum();
        if total.is_zero() {
            return Err(Error::DeadEnd { stage: 0, reason: format!("no admissible move from {f}") });
        }
        for (e, w) in moves.into_iter().filter(|(_, w)| !w.is_zero()) {
            let next = match dir {
                Direction::Delete => f.without_edge(e)?,
                Direction::Add => f.with_edge(e)?,
            };
            let q = p * BigRational::new(big(&w), big(&total));
            *out.entry(next.canonical_key()).or_insert_with(BigRational::zero) += q;
        }
    }
    Ok(DistributionTable { n: table.n, probs: out })
}

/// Law of `F_i` by iterating the kernel from `K_n` or the empty graph.
pub fn exact_marginal(n: usize, d: usize, i: usize, dir: Direction, oracle: &Oracle, ceiling: usize) -> Result<DistributionTable> {
    check_ceiling(n, ceiling)?;
    let limit = pair_count(n) - d * n / 2;
    let steps_allowed = match dir {
        Direction::Delete => limit,
        Direction::Add => d * n / 2,
    };
    if i > steps_allowed {
        return Err(Error::Precondition(format!("step {i} beyond the last step {steps_allowed}")));
    }
    let start = match dir {
        Direction::Delete => SimpleGraph::complete(n),
        Direction::Add => SimpleGraph::empty(n),
    };
    let mut table = DistributionTable::point_mass(&start);
    for _ in 0..i {
        table = exact_kernel_step(&table, d, dir, oracle)?;
    }
    Ok(table)
}

/// The law the marginals should follow:
///
/// * `Delete`, step `i`: `F(n, d, dn/2 + m)` with `m = C(n,2) - dn/2 - i`, i.e.
///   `P(F) = |K_d(F)| / (|K_d(n)| · C(C(n,2) - dn/2, m))`.
/// * `Add`, step `i`: a uniform `K` minus `dn/2 - i` of its edges, i.e.
///   `P(F) = |{K ⊇ F}| / (|K_d(n)| · C(dn/2, i))`.
///
/// Every graph with the right edge count is scored directly, independently
/// of the kernel.
pub fn closed_form_law(n: usize, d: usize, i: usize, dir: Direction, oracle: &Oracle, ceiling: usize) -> Result<DistributionTable> {
    check_ceiling(n, ceiling)?;
    let half = d * n / 2;
    let free = pair_count(n) - half;
    let (edges, norm) = match dir {
        Direction::Delete => {
            if i > free {
                return Err(Error::Precondition(format!("step {i} beyond the last step {free}")));
            }
            (pair_count(n) - i, binomial(BigUint::from(free), BigUint::from(free - i)))
        }
        Direction::Add => {
            if i > half {
                return Err(Error::Precondition(format!("step {i} beyond the last step {half}")));
            }
            (i, binomial(BigUint::from(half), BigUint::from(i)))
        }
    };
    let total = oracle.count_regular(&SimpleGraph::complete(n), d).0;
    if total.is_zero() {
        return Err(Error::InvalidParams(format!("no {d}-regular graph on {n} vertices")));
    }
    let denom = big(&(total * norm));
    let mut probs = BTreeMap::new();
    for_each_edge_subset(n, edges, &mut |f| {
        let c = match dir {
            Direction::Delete => oracle.count_regular(f, d).0,
            Direction::Add => oracle.count_extensions(f, d).0,
        };
        if !c.is_zero() {
            probs.insert(f.canonical_key(), BigRational::new(big(&c), denom.clone()));
        }
    });
    Ok(DistributionTable { n, probs })
}

/// Per-step comparison of the iterated kernel against the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalStep {
    pub step: usize,
    pub support: usize,
    pub total_is_one: bool,
    pub matches_closed_form: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalCheck {
    pub n: usize,
    pub d: usize,
    pub direction: Direction,
    pub steps: Vec<MarginalStep>,
    pub pass: bool,
}

/// Iterates the kernel through every step and compares each marginal with the
/// closed form, exactly.
pub fn verify_marginals(n: usize, d: usize, dir: Direction, oracle: &Oracle, ceiling: usize) -> Result<MarginalCheck> {
    check_ceiling(n, ceiling)?;
    let last = match dir {
        Direction::Delete => pair_count(n) - d * n / 2,
        Direction::Add => d * n / 2,
    };
    let start = match dir {
        Direction::Delete => SimpleGraph::complete(n),
        Direction::Add => SimpleGraph::empty(n),
    };
    let mut table = DistributionTable::point_mass(&start);
    let mut steps = Vec::with_capacity(last + 1);
    for step in 0..=last {
        if step > 0 {
            table = exact_kernel_step(&table, d, dir, oracle)?;
        }
        let law = closed_form_law(n, d, step, dir, oracle, ceiling)?;
        steps.push(MarginalStep {
            step,
            support: table.support(),
            total_is_one: table.total().is_one(),
            matches_closed_form: table == law,
        });
    }
    let pass = steps.iter().all(|s| s.total_is_one && s.matches_closed_form);
    Ok(MarginalCheck { n, d, direction: dir, steps, pass })
}
