//! The shared randomness `e_1, e_2, ...` (uniform pairs) and `x_1, x_2, ...`
//! (uniform on `[0, 1)`) that drives every coupled process of one trial.
//!
//! Each trial owns a key derived from `(master seed, trial index)`. Named
//! sub-streams are independent ChaCha streams under that key, so the order in
//! which consumers read from the tape never changes what they see.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, EdgePair};

const UNIT_BITS: u32 = 53;

fn label_id(label: &str) -> u64 {
    // FNV-1a: stable across platforms and releases.
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Key of trial `trial` under `master`.
pub fn trial_key(master: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng.random()
}

/// Independent generator for `(key, label)`.
pub fn stream(key: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(label_id(label));
    rng
}

/// A draw `x = k / 2^53` with `k` uniform in `[0, 2^53)`; comparisons are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnitDraw(u64);

impl UnitDraw {
    pub fn from_raw(k: u64) -> Self {
        Self(k & ((1 << UNIT_BITS) - 1))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / (1u64 << UNIT_BITS) as f64
    }

    /// `x <= a / b` (with `b > 0`), exactly.
    pub fn le_fraction(self, a: u64, b: u64) -> bool {
        debug_assert!(b > 0);
        (self.0 as u128) * (b as u128) <= (a as u128) << UNIT_BITS
    }

    pub fn le_big_fraction(self, a: &BigUint, b: &BigUint) -> bool {
        BigUint::from(self.0) * b <= a << UNIT_BITS
    }

    /// `x <= t`; exact because `x` is a dyadic rational representable in f64.
    pub fn le(self, t: f64) -> bool {
        self.value() <= t
    }
}

/// Identifies the tape; processes compare this before their transcripts are
/// cross-checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TapeId {
    pub n: usize,
    pub key: u64,
}

/// Lazily materialised randomness for one trial. Indices are 1-based.
#[derive(Debug, Clone)]
pub struct RandomnessTape {
    id: TapeId,
    edge_rng: ChaCha8Rng,
    unit_rng: ChaCha8Rng,
    edges: Vec<EdgePair>,
    units: Vec<UnitDraw>,
    limit: usize,
}

impl RandomnessTape {
    /// Default cap on the number of tape positions a trial may consume.
    pub const DEFAULT_LIMIT: usize = 50_000_000;

    pub fn new(n: usize, key: u64) -> Self {
        assert!(n >= 2, "tape needs at least one pair");
        Self {
            id: TapeId { n, key },
            edge_rng: stream(key, "edges"),
            unit_rng: stream(key, "units"),
            edges: Vec::new(),
            units: Vec::new(),
            limit: Self::DEFAULT_LIMIT,
        }
    }

    pub fn for_trial(n: usize, master: u64, trial: u64) -> Self {
        Self::new(n, trial_key(master, trial))
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn id(&self) -> TapeId {
        self.id
    }

    fn check(&self, idx: usize) -> Result<()> {
        if idx == 0 {
            return Err(Error::Precondition("tape indices start at 1".into()));
        }
        if idx > self.limit {
            return Err(Error::Capacity(format!("tape exhausted after {} positions", self.limit)));
        }
        Ok(())
    }

    /// `e_idx`.
    pub fn edge(&mut self, idx: usize) -> Result<EdgePair> {
        self.check(idx)?;
        let total = pair_count(self.id.n);
        while self.edges.len() < idx {
            let i = self.edge_rng.random_range(0..total);
            self.edges.push(EdgePair::from_index(self.id.n, i));
        }
        Ok(self.edges[idx - 1])
    }

    /// `x_idx`.
    pub fn unit(&mut self, idx: usize) -> Result<UnitDraw> {
        self.check(idx)?;
        while self.units.len() < idx {
            let k: u64 = self.unit_rng.random();
            self.units.push(UnitDraw::from_raw(k >> (64 - UNIT_BITS)));
        }
        Ok(self.units[idx - 1])
    }

    /// A `Bin(trials, p)` draw from the named sub-stream.
    pub fn binomial(&self, label: &str, trials: u64, p: f64) -> Result<u64> {
        let dist = Binomial::new(trials, p.clamp(0.0, 1.0))
            .map_err(|e| Error::InvalidParams(format!("binomial: {e}")))?;
        Ok(dist.sample(&mut stream(self.id.key, label)))
    }

    /// Auxiliary generator for the named sub-stream.
    pub fn aux(&self, label: &str) -> ChaCha8Rng {
        stream(self.id.key, label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn access_order_does_not_matter() {
        let mut a = RandomnessTape::for_trial(7, 42, 3);
        let mut b = RandomnessTape::for_trial(7, 42, 3);
        let late_a = (a.unit(50).unwrap(), a.edge(50).unwrap());
        for i in 1..=50 {
            b.edge(i).unwrap();
        }
        let late_b = (b.unit(50).unwrap(), b.edge(50).unwrap());
        assert_eq!(late_a, late_b);
        let mut c = RandomnessTape::for_trial(7, 42, 3);
        let mut d = RandomnessTape::for_trial(7, 42, 4);
        assert!((1..=10).any(|i| c.edge(i).unwrap() != d.edge(i).unwrap()));
    }

    #[test]
    fn exact_fraction_comparison() {
        let half = UnitDraw::from_raw(1 << 52);
        assert!(half.le_fraction(1, 2));
        assert!(!half.le_fraction(1, 3));
        assert!(half.le_big_fraction(&BigUint::from(2u8), &BigUint::from(4u8)));
        assert!(UnitDraw::from_raw(0).le_fraction(0, 5));
        assert!(half.le(0.5) && !half.le(0.4999999));
    }

    #[test]
    fn index_zero_and_limit_are_rejected() {
        let mut t = RandomnessTape::new(5, 1).with_limit(10);
        assert!(t.edge(0).is_err());
        assert!(t.unit(11).is_err());
        assert!(t.edge(10).is_ok());
    }

    #[test]
    fn units_look_uniform() {
        let mut t = RandomnessTape::new(5, 9);
        let mean = (1..=20_000).map(|i| t.unit(i).unwrap().value()).sum::<f64>() / 20_000.0;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }
}
