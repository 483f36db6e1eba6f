//! Model parameters and the η schedule shared by the processes and bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::pair_count;

/// Everything that parameterises one model instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub n: usize,
    pub d: usize,
    /// Additional edges on top of a regular graph (`F(n, d, dn/2 + m)`).
    pub m: usize,
    pub eps: f64,
    /// Slack in the lower coupling.
    pub eta: f64,
    /// Scale of the deviation schedule `η_i`.
    pub c0: f64,
    pub mu: f64,
    /// Constant in the degree condition `d >= C log n`.
    pub c_log: f64,
    /// Constant in the size limit `|U| <= C' n/d` of the expansion checks.
    pub c_prime: f64,
    pub sigma: f64,
    pub k: usize,
    /// Half-length of the switchings.
    pub ell: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n: 8,
            d: 3,
            m: 0,
            eps: 0.9,
            eta: 0.1,
            c0: 0.05,
            mu: 0.1,
            c_log: 1.0,
            c_prime: 1.0,
            sigma: 0.1,
            k: 2,
            ell: 1,
        }
    }
}

impl ModelParams {
    pub fn new(n: usize, d: usize) -> Self {
        Self { n, d, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n < 2 {
            return bad(format!("n = {} is too small", self.n));
        }
        if self.d == 0 || self.d >= self.n {
            return bad(format!("need 1 <= d <= n-1, got d = {}", self.d));
        }
        if (self.n * self.d) % 2 == 1 {
            return bad(format!("dn = {} is odd", self.n * self.d));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps = {} must be positive", self.eps));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return bad(format!("eta = {} must lie in [0, 1)", self.eta));
        }
        if !(self.c0 >= 0.0 && self.c0.is_finite()) || !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad("c0 and mu must be finite and non-negative".into());
        }
        if self.m > self.non_edges() {
            return bad(format!("m = {} exceeds C(n,2) - dn/2 = {}", self.m, self.non_edges()));
        }
        Ok(())
    }

    pub fn pairs(&self) -> usize {
        pair_count(self.n)
    }

    /// `dn/2`.
    pub fn regular_edges(&self) -> usize {
        self.d * self.n / 2
    }

    /// `C(n,2) - dn/2`.
    pub fn non_edges(&self) -> usize {
        self.pairs() - self.regular_edges()
    }

    /// `R = ⌊ε d n / 8⌋`.
    pub fn slack(&self) -> usize {
        (self.eps * (self.d * self.n) as f64 / 8.0).floor() as usize
    }

    /// Edge probability of the upper binomial graph, clamped into `[0, 1]`.
    pub fn p_upper(&self) -> f64 {
        ((1.0 + self.eps) * self.d as f64 / self.n as f64).clamp(0.0, 1.0)
    }

    /// Edge probability of the lower binomial graph, clamped into `[0, 1]`.
    pub fn p_lower(&self) -> f64 {
        ((1.0 - self.eps) * self.d as f64 / self.n as f64).clamp(0.0, 1.0)
    }

    /// Number of steps of the lower reference sequence: `⌊dn/2 - ηn⌋`, at least 0.
    pub fn lower_steps(&self) -> usize {
        (self.regular_edges() as f64 - self.eta * self.n as f64).floor().max(0.0) as usize
    }

    /// Number of steps of the upper reference sequences: `C(n,2) - dn/2 - 2R`, at least 0.
    pub fn upper_steps(&self) -> usize {
        self.non_edges().saturating_sub(2 * self.slack())
    }

    /// Density of the extra edges in `F(n, d, dn/2 + m)`.
    pub fn extra_density(&self) -> f64 {
        self.m as f64 / self.non_edges() as f64
    }

    /// `d >= C log n`.
    pub fn degree_condition_holds(&self) -> bool {
        self.d as f64 >= self.c_log * (self.n as f64).ln()
    }

    pub fn schedule(&self) -> EtaSchedule {
        EtaSchedule::new(self)
    }
}

/// `η_i = C0 · max{ μ / ln n, (n ln n / (C(n,2) - dn/2 - i))^{1/8} }` for
/// `i < C(n,2) - dn/2`, and 0 beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaSchedule {
    n: usize,
    c0: f64,
    mu: f64,
    non_edges: usize,
    half_degree_sum: usize,
    slack: usize,
}

impl EtaSchedule {
    pub fn new(p: &ModelParams) -> Self {
        Self {
            n: p.n,
            c0: p.c0,
            mu: p.mu,
            non_edges: p.non_edges(),
            half_degree_sum: p.regular_edges(),
            slack: p.slack(),
        }
    }

    pub fn with_c0(&self, c0: f64) -> Self {
        Self { c0, ..self.clone() }
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// `η_i / C0`.
    pub fn unit_eta(&self, i: usize) -> f64 {
        if i >= self.non_edges {
            return 0.0;
        }
        let n = self.n as f64;
        let ln = n.ln();
        let floor = if ln > 0.0 { self.mu / ln } else { 0.0 };
        let tail = (n * ln / (self.non_edges - i) as f64).powf(0.125);
        floor.max(tail)
    }

    pub fn eta(&self, i: usize) -> f64 {
        self.c0 * self.unit_eta(i)
    }

    /// Acceptance threshold of stage `i >= 1` in the upper comparison process.
    /// Stages past `C(n,2) - dn/2 - R` accept unconditionally.
    pub fn upper_threshold(&self, i: usize) -> f64 {
        1.0 - self.c0 * self.unit_upper_penalty(i)
    }

    /// `η_{i+R-1} (dn/2) / (C(n,2) - dn/2 - R - (i-1))`, divided by `C0`.
    pub fn unit_upper_penalty(&self, i: usize) -> f64 {
        debug_assert!(i >= 1);
        let last = self.non_edges.saturating_sub(self.slack);
        if i > last {
            return 0.0;
        }
        let denom = (last - (i - 1)) as f64;
        self.unit_eta(i + self.slack - 1) * self.half_degree_sum as f64 / denom
    }

    /// Lower bound on every acceptance ratio at stage `i` that the coupling
    /// argument needs: `1 - η_{i-1}(dn/2)/(C(n,2) - dn/2 - i + 1)`.
    pub fn ratio_floor(&self, i: usize) -> f64 {
        debug_assert!(i >= 1);
        if i > self.non_edges {
            return f64::NEG_INFINITY;
        }
        let denom = (self.non_edges - i + 1) as f64;
        1.0 - self.eta(i - 1) * self.half_degree_sum as f64 / denom
    }

    pub fn slack(&self) -> usize {
        self.slack
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = ModelParams { n: 8, d: 3, eps: 0.9, eta: 0.1, ..Default::default() };
        p.validate().unwrap();
        assert_eq!(p.pairs(), 28);
        assert_eq!(p.regular_edges(), 12);
        assert_eq!(p.non_edges(), 16);
        assert_eq!(p.slack(), 2);
        assert_eq!(p.upper_steps(), 12);
        assert_eq!(p.lower_steps(), 11);
        assert!((p.p_upper() - 0.7125).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(ModelParams::new(5, 3).validate().is_err());
        assert!(ModelParams::new(5, 5).validate().is_err());
        assert!(ModelParams { eta: 1.0, ..ModelParams::new(6, 3) }.validate().is_err());
        assert!(ModelParams { m: 7, ..ModelParams::new(6, 3) }.validate().is_err());
        assert!(ModelParams { m: 6, ..ModelParams::new(6, 3) }.validate().is_ok());
    }

    #[test]
    fn eta_vanishes_past_the_end_and_grows_towards_it() {
        let s = ModelParams { c0: 1.0, ..ModelParams::new(8, 3) }.schedule();
        assert_eq!(s.eta(16), 0.0);
        assert_eq!(s.eta(40), 0.0);
        assert!(s.eta(15) > s.eta(0));
        let n = 8f64;
        let expected = (n * n.ln() / 16.0).powf(0.125).max(0.1 / n.ln());
        assert!((s.eta(0) - expected).abs() < 1e-15);
    }

    #[test]
    fn thresholds_become_trivial_after_the_cutoff() {
        let p = ModelParams::new(8, 3);
        let s = p.schedule();
        assert_eq!(s.upper_threshold(15), 1.0);
        assert!(s.upper_threshold(14) < 1.0);
        assert!(s.upper_threshold(1) > 0.9);
    }
}
