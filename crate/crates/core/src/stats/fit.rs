//! Chi-square goodness of fit against exact laws, and binomial rates with
//! exact (Clopper–Pearson) confidence intervals.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, Binomial, ChiSquared, ContinuousCDF, Discrete};

use crate::coupling::DistributionTable;
use crate::error::{Error, Result};
use crate::graph::{GraphKey, SimpleGraph};

/// Cells with a smaller expected count are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitCell {
    pub label: String,
    pub expected: f64,
    pub observed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub samples: u64,
    /// Cells after pooling; expected counts sum to `samples`.
    pub cells: Vec<FitCell>,
}

/// Counts of observed canonical keys; merge by adding.
pub type SampleCounts = BTreeMap<GraphKey, u64>;

pub fn tally<'a>(keys: impl IntoIterator<Item = &'a GraphKey>) -> SampleCounts {
    let mut out = SampleCounts::new();
    for k in keys {
        *out.entry(k.clone()).or_insert(0) += 1;
    }
    out
}

pub fn merge_counts(into: &mut SampleCounts, other: &SampleCounts) {
    for (k, c) in other {
        *into.entry(k.clone()).or_insert(0) += c;
    }
}

/// Pearson's statistic over `(label, probability, observed)` cells. Cells with
/// expected count below [`MIN_EXPECTED`] are pooled into one cell, which
/// absorbs the next-smallest cells until it reaches the minimum too.
pub fn chi_square_fit(cells: Vec<(String, f64, u64)>) -> Result<FitResult> {
    let samples: u64 = cells.iter().map(|c| c.2).sum();
    let mass: f64 = cells.iter().map(|c| c.1).sum();
    if cells.is_empty() || (mass - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("cell probabilities sum to {mass}, not 1")));
    }
    let mut cells: Vec<FitCell> = cells
        .into_iter()
        .map(|(label, p, observed)| FitCell { label, expected: p * samples as f64, observed })
        .collect();
    cells.sort_by(|a, b| a.expected.total_cmp(&b.expected).then_with(|| a.label.cmp(&b.label)));
    let small = cells.iter().take_while(|c| c.expected < MIN_EXPECTED).count();
    let mut pooled: Vec<FitCell> = Vec::with_capacity(cells.len());
    let mut rest = cells.into_iter();
    if small > 0 {
        let mut pool = FitCell { label: "pooled".into(), expected: 0.0, observed: 0 };
        let mut taken = 0;
        for c in rest.by_ref() {
            pool.expected += c.expected;
            pool.observed += c.observed;
            taken += 1;
            if taken >= small && pool.expected >= MIN_EXPECTED {
                break;
            }
        }
        pooled.push(pool);
    }
    pooled.extend(rest);
    let statistic: f64 = pooled
        .iter()
        .filter(|c| c.expected > 0.0)
        .map(|c| (c.observed as f64 - c.expected).powi(2) / c.expected)
        .sum();
    let df = pooled.len().saturating_sub(1);
    let p_value = if df == 0 {
        1.0
    } else {
        ChiSquared::new(df as f64).map_err(|e| Error::InvalidParams(e.to_string()))?.sf(statistic)
    };
    Ok(FitResult { statistic, df, p_value, samples, cells: pooled })
}

/// Fit of observed graphs against an exact law on labeled graphs. A graph
/// outside the law's support is a model violation.
pub fn chi_square_uniformity(samples: &SampleCounts, law: &DistributionTable) -> Result<FitResult> {
    if let Some(k) = samples.keys().find(|k| !law.probs.contains_key(*k)) {
        let g = SimpleGraph::from_key(k);
        return Err(Error::ModelViolation(format!("observed {g}, which has probability 0")));
    }
    let cells = law
        .probs
        .iter()
        .map(|(k, p)| {
            let prob = p.to_f64().unwrap_or(f64::NAN);
            (SimpleGraph::from_key(k).to_literal(), prob, samples.get(k).copied().unwrap_or(0))
        })
        .collect();
    chi_square_fit(cells)
}

/// Fit of observed values against `Bin(trials, p)`.
pub fn chi_square_binomial(observed: &BTreeMap<u64, u64>, trials: u64, p: f64) -> Result<FitResult> {
    if let Some(v) = observed.keys().find(|&&v| v > trials) {
        return Err(Error::ModelViolation(format!("value {v} exceeds {trials} trials")));
    }
    let law = Binomial::new(p, trials).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let cells = (0..=trials)
        .map(|v| (v.to_string(), law.pmf(v), observed.get(&v).copied().unwrap_or(0)))
        .filter(|c| c.1 > 0.0 || c.2 > 0)
        .collect::<Vec<_>>();
    // Renormalise away floating-point dust in the tails.
    let mass: f64 = cells.iter().map(|c| c.1).sum();
    chi_square_fit(cells.into_iter().map(|(l, q, o)| (l, q / mass, o)).collect())
}

/// A frequency with its exact binomial confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub confidence: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl RateEstimate {
    /// Clopper–Pearson interval at the given two-sided confidence level.
    pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> Result<Self> {
        if trials == 0 || successes > trials {
            return Err(Error::InvalidParams(format!("{successes} successes in {trials} trials")));
        }
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::InvalidParams(format!("confidence {confidence} must lie in (0, 1)")));
        }
        let alpha = 1.0 - confidence;
        let (x, n) = (successes as f64, trials as f64);
        let beta = |a: f64, b: f64, q: f64| -> Result<f64> {
            Ok(Beta::new(a, b).map_err(|e| Error::InvalidParams(e.to_string()))?.inverse_cdf(q))
        };
        let ci_lo = if successes == 0 { 0.0 } else { beta(x, n - x + 1.0, alpha / 2.0)? };
        let ci_hi = if successes == trials { 1.0 } else { beta(x + 1.0, n - x, 1.0 - alpha / 2.0)? };
        Ok(Self { successes, trials, rate: x / n, confidence, ci_lo, ci_hi })
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_lo <= p && p <= self.ci_hi
    }
}

/// Containment frequency over a list of per-trial outcomes.
pub fn containment_rate(outcomes: &[bool], confidence: f64) -> Result<RateEstimate> {
    let hits = outcomes.iter().filter(|&&b| b).count() as u64;
    RateEstimate::clopper_pearson(hits, outcomes.len() as u64, confidence)
}
