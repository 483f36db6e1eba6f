//! Closed-form concentration bounds and the η-schedule mass check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// `exp(-ε²μ / (2(1 + ε/3)))`: upper tail of a sum of independent indicators.
pub fn mcdiarmid_bound(mu: f64, eps: f64) -> Result<f64> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParams(format!("mu = {mu} must be finite and non-negative")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParams(format!("eps = {eps} must be finite and non-negative")));
    }
    Ok((-eps * eps * mu / (2.0 * (1.0 + eps / 3.0))).exp())
}

/// `2 exp(-μγ²/3)`: two-sided tail of a binomial with mean `μ`.
pub fn chernoff_bound(mu: f64, gamma: f64) -> Result<f64> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParams(format!("mu = {mu} must be finite and non-negative")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParams(format!("gamma = {gamma} must lie in (0, 1)")));
    }
    Ok(2.0 * (-mu * gamma * gamma / 3.0).exp())
}

/// Expected number of rejections in the upper comparison process over its
/// first `C(n,2) - dn/2 - 2R` stages, against the budget `R/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleMass {
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub c0: f64,
    pub mu: f64,
    pub steps: usize,
    /// The sum with the scale factor `C0` set to 1.
    pub unit_mass: f64,
    /// `C0 · unit_mass`.
    pub mass: f64,
    pub slack: usize,
    pub pass: bool,
}

/// `E S = Σ_{i=1}^{N} η_{i+R-1} (dn/2) / (C(n,2) - dn/2 - R - i + 1)` with
/// `N = C(n,2) - dn/2 - 2R`; passes iff `E S <= R/2`.
pub fn schedule_mass(params: &ModelParams) -> Result<ScheduleMass> {
    if (params.n * params.d) % 2 == 1 {
        return Err(Error::InvalidParams(format!("dn = {} is odd", params.n * params.d)));
    }
    let schedule = params.schedule();
    let steps = params.upper_steps();
    let unit_mass: f64 = (1..=steps).map(|i| schedule.unit_upper_penalty(i)).sum();
    let mass = params.c0 * unit_mass;
    let slack = params.slack();
    Ok(ScheduleMass {
        n: params.n,
        d: params.d,
        eps: params.eps,
        c0: params.c0,
        mu: params.mu,
        steps,
        unit_mass,
        mass,
        slack,
        pass: mass <= slack as f64 / 2.0,
    })
}

/// A grid of parameter points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleGrid {
    pub n: Vec<usize>,
    pub d: Vec<usize>,
    pub eps: Vec<f64>,
    pub c0: Vec<f64>,
    pub mu: Vec<f64>,
}

impl Default for ScheduleGrid {
    fn default() -> Self {
        Self {
            n: vec![8, 10, 12, 16, 20],
            d: vec![2, 3, 4],
            eps: vec![0.5, 0.9],
            c0: vec![0.01, 0.05, 0.25, 1.0],
            mu: vec![0.1, 1.0],
        }
    }
}

impl ScheduleGrid {
    /// Every point with `dn` even and `d < n`, in lexicographic order.
    pub fn points(&self) -> Vec<ModelParams> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &d in &self.d {
                if d >= n || (n * d) % 2 == 1 {
                    continue;
                }
                for &eps in &self.eps {
                    for &c0 in &self.c0 {
                        for &mu in &self.mu {
                            out.push(ModelParams { n, d, eps, c0, mu, ..ModelParams::default() });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn evaluate(&self) -> Vec<ScheduleMass> {
        self.points().iter().map(|p| schedule_mass(p).expect("grid points have dn even")).collect()
    }
}
