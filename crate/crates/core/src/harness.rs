//! Experiment orchestration: a serialisable configuration, trial execution on
//! a worker pool with order-independent reduction, and report emission.
//!
//! Reports are deterministic functions of the configuration; only the
//! `execution` block (worker count and wall time) may differ between runs.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::{
    check_connection, check_degree_band, check_expansion_fk, check_expansion_k, check_fk_degrees,
    check_local_density, check_neighborhood_sums, check_uv_distribution, connection_floor, delta, DensityCaps,
    PairSource, Property, PropertyReport, SearchConfig,
};
use crate::coupling::{
    run_coupled_lower, run_coupled_upper, run_gstar, run_lower_addition, run_upper_deletion, verify_marginals,
    verify_transcript_interleaving, Backend, Direction, DistributionTable, MarginalCheck,
};
use crate::error::{Error, Result};
use crate::graph::{EdgePair, SimpleGraph, Vertex, VertexSet};
use crate::oracle::{count_with_edge, enumerate_regular, Oracle, OracleConfig};
use crate::params::ModelParams;
use crate::stats::{
    chi_square_binomial, chi_square_uniformity, inclusion_probability, kim_vu_report, path_polynomial_stats,
    schedule_mass, FitResult, KimVuReport, RateEstimate, SampleCounts, ScheduleGrid, ScheduleMass,
};
use crate::switching::{
    build_double_edge, build_single_edge, build_six_cycle, build_ten_cycle, six_cycle_statistic, verify_double_count,
    DoubleCountReport, PathQuery, SixCycleMode,
};
use crate::tape::{trial_key, RandomnessTape};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchKind {
    SingleEdge,
    DoubleEdge,
    TenCycle,
    SixCycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    /// The regular graph of the deletion process against the uniform law.
    Upper,
    /// The regular graph of the addition process against the uniform law.
    Lower,
    /// Edge count of `G*` against its binomial law.
    GstarEdges,
}

/// Subcommand and its own options. Vertices are 1-based labels; edges use
/// the `u-v` form of graph literals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// `|K_d(F)|`, `|K_d(F) ∋ e|` for every edge and the double-count identity.
    Count { host: Option<SimpleGraph> },
    /// Alternating paths of length `2ℓ` in `(F, K)`.
    Paths {
        host: Option<SimpleGraph>,
        /// Drawn uniformly from `K_d(F)` when absent.
        regular: Option<SimpleGraph>,
        x: Vertex,
        y: Vertex,
        #[serde(default)]
        avoid: Vec<Vertex>,
    },
    Switchings {
        kind: SwitchKind,
        /// Host for the single- and double-edge switchings, fixed subgraph for
        /// ten-cycles; defaults to `K_n` and the empty graph respectively.
        host: Option<SimpleGraph>,
        e: EdgePair,
        g: EdgePair,
        #[serde(default)]
        window: Vec<Vertex>,
        mode: Option<SixCycleMode>,
    },
    Audit {
        property: Option<Property>,
        lambda: f64,
        band_constant: f64,
        log_divisor: bool,
        search: SearchConfig,
    },
    Kimvu {
        x: Vertex,
        y: Vertex,
        #[serde(default)]
        avoid: Vec<Vertex>,
    },
    ScheduleMass { grid: Option<ScheduleGrid> },
    Fit { target: FitTarget },
    CoupleUpper,
    CoupleLower,
    VerifyMarginals { direction: Option<Direction> },
    Sweep { eps: Vec<f64> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Count { .. } => "count",
            Command::Paths { .. } => "paths",
            Command::Switchings { .. } => "switchings",
            Command::Audit { .. } => "audit",
            Command::Kimvu { .. } => "kimvu",
            Command::ScheduleMass { .. } => "schedule-mass",
            Command::Fit { .. } => "fit",
            Command::CoupleUpper => "couple-upper",
            Command::CoupleLower => "couple-lower",
            Command::VerifyMarginals { .. } => "verify-marginals",
            Command::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub command: Command,
    pub params: ModelParams,
    pub trials: u64,
    pub seed: u64,
    /// Largest `n` for which exact laws are enumerated.
    pub exact_ceiling: usize,
    pub format: OutputFormat,
    /// Two-sided confidence of reported rate intervals.
    pub confidence: f64,
    /// Turns soft metrics into hard checks: minimum p-value for fits,
    /// minimum containment rate for couplings and sweeps.
    pub threshold: Option<f64>,
    /// Worker count; not part of the report payload.
    #[serde(skip_serializing)]
    pub jobs: usize,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: Command::VerifyMarginals { direction: None },
            params: ModelParams::default(),
            trials: 100,
            seed: 0,
            exact_ceiling: 6,
            format: OutputFormat::Json,
            confidence: 0.999,
            threshold: None,
            jobs: 1,
            out: None,
        }
    }
}

fn to_index(label: Vertex, n: usize) -> Result<Vertex> {
    if label == 0 || label > n {
        return Err(Error::Config(format!("vertex label {label} outside 1..={n}")));
    }
    Ok(label - 1)
}

fn to_set(labels: &[Vertex], n: usize) -> Result<VertexSet> {
    let idx = labels.iter().map(|&l| to_index(l, n)).collect::<Result<Vec<_>>>()?;
    VertexSet::from_vertices(n, idx)
}

impl ExperimentConfig {
    pub fn new(command: Command, params: ModelParams) -> Self {
        Self { command, params, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        self.params.validate()?;
        let n = self.params.n;
        if self.trials == 0 {
            return cfg("trials must be at least 1".into());
        }
        if self.jobs == 0 {
            return cfg("jobs must be at least 1".into());
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return cfg(format!("confidence {} must lie in (0, 1)", self.confidence));
        }
        let graph = |g: &Option<SimpleGraph>| match g {
            Some(g) if g.order() != n => cfg(format!("graph has {} vertices, expected {n}", g.order())),
            _ => Ok(()),
        };
        let edge = |e: &EdgePair| if e.v() >= n { cfg(format!("edge {e} outside 1..={n}")) } else { Ok(()) };
        match &self.command {
            Command::Count { host } => graph(host)?,
            Command::Paths { host, regular, x, y, avoid } => {
                graph(host)?;
                graph(regular)?;
                to_index(*x, n)?;
                to_index(*y, n)?;
                to_set(avoid, n)?;
            }
            Command::Switchings { host, e, g, window, kind, .. } => {
                graph(host)?;
                edge(e)?;
                edge(g)?;
                to_set(window, n)?;
                if *kind == SwitchKind::SixCycle && window.is_empty() {
                    return cfg("six-cycle switchings need a window".into());
                }
            }
            Command::Audit { lambda, .. } => {
                if self.params.m == 0 {
                    return cfg("audit needs m >= 1 extra edges".into());
                }
                if !(*lambda >= 0.0 && lambda.is_finite()) {
                    return cfg(format!("lambda = {lambda} must be finite and non-negative"));
                }
            }
            Command::Kimvu { x, y, avoid } => {
                if self.params.m == 0 {
                    return cfg("kimvu needs m >= 1 extra edges".into());
                }
                to_index(*x, n)?;
                to_index(*y, n)?;
                to_set(avoid, n)?;
            }
            Command::Sweep { eps } => {
                if eps.is_empty() {
                    return cfg("sweep needs at least one eps value".into());
                }
                for &e in eps {
                    ModelParams { eps: e, ..self.params.clone() }.validate()?;
                }
            }
            Command::ScheduleMass { .. }
            | Command::Fit { .. }
            | Command::CoupleUpper
            | Command::CoupleLower
            | Command::VerifyMarginals { .. } => {}
        }
        Ok(())
    }
}

/// A named verdict. Hard checks are exact statements and decide the exit
/// status; soft checks are measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub hard: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn hard(name: &str, pass: bool, detail: Option<String>) -> Self {
        Self { name: name.into(), hard: true, pass, detail }
    }

    fn soft(name: &str, pass: bool, detail: Option<String>) -> Self {
        Self { name: name.into(), hard: false, pass, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub host: SimpleGraph,
    pub d: usize,
    pub count: String,
    /// `|{K ∈ K_d(F) : e ∈ K}|` for every edge of the host.
    pub with_edge: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathsResult {
    pub host: SimpleGraph,
    pub regular: SimpleGraph,
    pub x: Vertex,
    pub y: Vertex,
    pub half_length: usize,
    pub between: u64,
    /// Paths of the same length from `x` to anywhere.
    pub from_x: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchingResult {
    pub kind: SwitchKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<i64>,
    pub report: DoubleCountReport,
    /// Every graph on both sides is `d`-regular and inside the host.
    pub members_valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub property: Property,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub trials: u64,
    pub passes: u64,
    pub pass_rate: f64,
    pub worst_margin: Option<f64>,
    /// The trial report with the smallest margin.
    pub worst: PropertyReport,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UpperSummary {
    pub contained: u64,
    pub interleaving_pass: u64,
    pub first_appearance_violations: u64,
    pub budget_holds: u64,
    pub ratio_floor_holds: u64,
    pub containment_forced: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LowerSummary {
    pub contained: u64,
    pub ratio_floor_holds: u64,
    pub reference_contained: u64,
    /// Trials where the ratio floor held but the reference graph escaped.
    pub floor_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub process: String,
    pub rate: RateEstimate,
}

/// Command-specific results; only the fields the command produces are set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Results {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<CountResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<PathsResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switchings: Option<Vec<SwitchingResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<Vec<AuditSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kimvu: Option<Vec<KimVuReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule_mass: Option<Vec<ScheduleMass>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_square: Option<FitResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub containment_rate: Option<RateEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<UpperSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<LowerSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marginal_check: Option<Vec<MarginalCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
}

/// Timing and scheduling; excluded from the reproducible payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub jobs: usize,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub params: ModelParams,
    pub trials: u64,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    /// All hard checks pass.
    pub pass: bool,
    #[serde(flatten)]
    pub results: Results,
    pub execution: Execution,
}

impl Report {
    /// The JSON report without the `execution` block.
    pub fn payload(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("reports serialise");
        if let Some(map) = v.as_object_mut() {
            map.remove("execution");
        }
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

/// Runs `f` on trials `0..trials` using `jobs` workers; results come back in
/// trial order, and the first failing trial (by index) decides the error.
pub fn run_trials<T, F>(jobs: usize, trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let out: Vec<Result<T>> = pool.install(|| (0..trials).into_par_iter().map(&f).collect());
    out.into_iter().collect()
}

/// A uniform `K` from the deletion process and `m` uniform non-edges of it,
/// both drawn from the trial's tape: `(F, K)`.
pub fn planted_pair(params: &ModelParams, seed: u64, trial: u64, oracle: &Oracle) -> Result<(SimpleGraph, SimpleGraph)> {
    let mut tape = RandomnessTape::for_trial(params.n, seed, trial);
    let (_, k) = run_upper_deletion(params, &mut tape, oracle, Backend::Auto)?;
    let holes: Vec<EdgePair> = k.complement().edges().collect();
    let mut rng = tape.aux("planted");
    let mut f = k.clone();
    for i in sample(&mut rng, holes.len(), params.m).iter() {
        f.add_edge(holes[i])?;
    }
    Ok((f, k))
}

fn uniform_law(n: usize, graphs: &[SimpleGraph]) -> DistributionTable {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let p = BigRational::new(BigInt::from(1), BigInt::from(graphs.len()));
    DistributionTable { n, probs: graphs.iter().map(|g| (g.canonical_key(), p.clone())).collect() }
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    oracle: Oracle,
    checks: Vec<Check>,
    results: Results,
}

impl Runner<'_> {
    fn p(&self) -> &ModelParams {
        &self.cfg.params
    }

    fn run(&mut self) -> Result<()> {
        match self.cfg.command.clone() {
            Command::Count { host } => self.count(host),
            Command::Paths { host, regular, x, y, avoid } => self.paths(host, regular, x, y, &avoid),
            Command::Switchings { kind, host, e, g, window, mode } => self.switchings(kind, host, e, g, &window, mode),
            Command::Audit { property, lambda, band_constant, log_divisor, search } => {
                self.audit(property, lambda, band_constant, log_divisor, search)
            }
            Command::Kimvu { x, y, avoid } => self.kimvu(x, y, &avoid),
            Command::ScheduleMass { grid } => self.schedule(grid),
            Command::Fit { target } => self.fit(target),
            Command::CoupleUpper => {
                let rate = self.upper(self.p().clone())?;
                self.results.containment_rate = Some(rate);
                Ok(())
            }
            Command::CoupleLower => {
                let rate = self.lower(self.p().clone())?;
                self.results.containment_rate = Some(rate);
                Ok(())
            }
            Command::VerifyMarginals { direction } => self.marginals(direction),
            Command::Sweep { eps } => self.sweep(&eps),
        }
    }

    fn count(&mut self, host: Option<SimpleGraph>) -> Result<()> {
        let d = self.p().d;
        let host = host.unwrap_or_else(|| SimpleGraph::complete(self.p().n));
        let total = self.oracle.count_regular(&host, d);
        let mut with_edge = BTreeMap::new();
        let mut sum = num_bigint::BigUint::default();
        for e in host.edges() {
            let c = count_with_edge(&host, d, e)?;
            sum += &c.0;
            with_edge.insert(e.to_string(), c.0.to_string());
        }
        let expected = &total.0 * num_bigint::BigUint::from(d * host.order() / 2);
        self.checks.push(Check::hard(
            "double_count",
            sum == expected,
            Some(format!("sum over edges {sum}, (dn/2)|K_d(F)| {expected}")),
        ));
        self.results.count = Some(CountResult { host, d, count: total.0.to_string(), with_edge });
        Ok(())
    }

    fn paths(
        &mut self,
        host: Option<SimpleGraph>,
        regular: Option<SimpleGraph>,
        x: Vertex,
        y: Vertex,
        avoid: &[Vertex],
    ) -> Result<()> {
        let p = self.p().clone();
        let host = host.unwrap_or_else(|| SimpleGraph::complete(p.n));
        let regular = match regular {
            Some(k) => k,
            None => {
                let family = enumerate_regular(&host, p.d, &OracleConfig::default())?;
                if family.is_empty() {
                    return Err(Error::Precondition(format!("host has no {}-regular spanning subgraph", p.d)));
                }
                let mut rng = RandomnessTape::new(p.n, trial_key(self.cfg.seed, 0)).aux("paths");
                family[rand::Rng::random_range(&mut rng, 0..family.len())].clone()
            }
        };
        let (xi, yi) = (to_index(x, p.n)?, to_index(y, p.n)?);
        let z = to_set(avoid, p.n)?;
        let length = 2 * p.ell;
        let q = PathQuery { f: &host, k: &regular, x: xi, y: Some(yi), length, avoid: Some(&z), first: Default::default() };
        let between = q.count()?;
        let from_x = PathQuery { y: None, avoid: None, ..q }.count()?;
        let narrow = |c: u128| u64::try_from(c).map_err(|_| Error::Capacity("path count exceeds u64".into()));
        self.results.paths = Some(PathsResult {
            host,
            regular,
            x,
            y,
            half_length: p.ell,
            between: narrow(between)?,
            from_x: narrow(from_x)?,
        });
        Ok(())
    }

    fn switchings(
        &mut self,
        kind: SwitchKind,
        host: Option<SimpleGraph>,
        e: EdgePair,
        g: EdgePair,
        window: &[Vertex],
        mode: Option<SixCycleMode>,
    ) -> Result<()> {
        let p = self.p().clone();
        let (n, d, ell) = (p.n, p.d, p.ell);
        let ocfg = OracleConfig::default();
        let mut out = Vec::new();
        let valid = |graphs: &[SimpleGraph], host: &SimpleGraph, base: Option<&SimpleGraph>| {
            graphs.iter().all(|k| k.is_regular(d) && k.is_subgraph_of(host) && base.is_none_or(|b| b.is_subgraph_of(k)))
        };
        match kind {
            SwitchKind::SingleEdge | SwitchKind::DoubleEdge => {
                let host = host.unwrap_or_else(|| SimpleGraph::complete(n));
                let sg = if kind == SwitchKind::SingleEdge {
                    build_single_edge(&host, d, e, ell, &ocfg)?
                } else {
                    build_double_edge(&host, d, e, g, ell, &ocfg)?
                };
                let members_valid = valid(&sg.left, &host, None) && valid(&sg.right, &host, None);
                out.push(SwitchingResult { kind, level: None, report: verify_double_count(&sg), members_valid });
            }
            SwitchKind::TenCycle => {
                let base = host.unwrap_or_else(|| SimpleGraph::empty(n));
                let sg = build_ten_cycle(&base, d, e, g, &ocfg)?;
                let full = SimpleGraph::complete(n);
                let members_valid = valid(&sg.left, &full, Some(&base)) && valid(&sg.right, &full, Some(&base));
                out.push(SwitchingResult { kind, level: None, report: verify_double_count(&sg), members_valid });
            }
            SwitchKind::SixCycle => {
                let host = host.unwrap_or_else(|| SimpleGraph::complete(n));
                let w = to_set(window, n)?;
                let family = enumerate_regular(&host, d, &ocfg)?;
                let modes = match mode {
                    Some(m) => vec![m],
                    None => vec![SixCycleMode::TwoIn, SixCycleMode::OneIn],
                };
                for mode in modes {
                    let levels: std::collections::BTreeSet<i64> =
                        family.iter().map(|k| six_cycle_statistic(k, &w, mode)).collect();
                    for &level in &levels {
                        if !levels.contains(&(level - 1)) {
                            continue;
                        }
                        let sg = build_six_cycle(&host, &family, d, &w, mode, level)?;
                        let members_valid = valid(&sg.left, &host, None) && valid(&sg.right, &host, None);
                        out.push(SwitchingResult { kind, level: Some(level), report: verify_double_count(&sg), members_valid });
                    }
                }
            }
        }
        let pass = out.iter().all(|r| r.report.pass && r.members_valid);
        self.checks.push(Check::hard("double_count", pass, Some(format!("{} switching graphs", out.len()))));
        self.results.switchings = Some(out);
        Ok(())
    }

    fn audit(
        &mut self,
        property: Option<Property>,
        lambda: f64,
        band_constant: f64,
        log_divisor: bool,
        search: SearchConfig,
    ) -> Result<()> {
        let p = self.p().clone();
        let (n, d, m) = (p.n, p.d, p.m);
        let dl = delta(m, n);
        let props: Vec<Property> = property.map_or_else(|| Property::ALL.to_vec(), |q| vec![q]);
        let seed = self.cfg.seed;
        let oracle = &self.oracle;
        let per_trial = run_trials(self.cfg.jobs, self.cfg.trials, |t| {
            let (f, k) = planted_pair(&p, seed, t, oracle)?;
            let search = SearchConfig { seed: trial_key(search.seed ^ seed, t), ..search };
            let diff = f.difference(&k)?;
            let pair_source = |limit_exhaustive: bool| {
                if limit_exhaustive {
                    PairSource::Exhaustive
                } else {
                    PairSource::Sampled { samples: search.samples, seed: search.seed }
                }
            };
            props
                .iter()
                .map(|&q| match q {
                    Property::DegreeBand => Ok(check_degree_band(&f, d, dl, p.eta)),
                    Property::FkDegrees => check_fk_degrees(&f, &k, dl, band_constant),
                    Property::NeighborhoodSums => check_neighborhood_sums(&f, &k, dl, d, None),
                    Property::ExpansionK => check_expansion_k(&f, &k, lambda, d, dl, log_divisor, &search),
                    Property::ExpansionFk => check_expansion_fk(&f, &k, lambda, dl, d, &search),
                    Property::LocalDensity => Ok(check_local_density(&diff, DensityCaps::standard(n), &search)),
                    Property::Connection => {
                        check_connection(&f, &k, dl, lambda, connection_floor(lambda, n), &pair_source(n <= 10))
                    }
                    Property::UvDistribution => match check_uv_distribution(&k, d, &PairSource::Exhaustive) {
                        Err(Error::Capacity(_)) => check_uv_distribution(&k, d, &pair_source(false)),
                        other => other,
                    },
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let mut summaries = Vec::new();
        for (i, &q) in props.iter().enumerate() {
            let reports: Vec<&PropertyReport> = per_trial.iter().map(|r| &r[i]).collect();
            let passes = reports.iter().filter(|r| r.pass).count() as u64;
            let worst = reports
                .iter()
                .min_by(|a, b| {
                    let key = |r: &PropertyReport| r.worst_margin.unwrap_or(f64::INFINITY);
                    key(a).total_cmp(&key(b))
                })
                .map(|r| (*r).clone())
                .expect("at least one trial");
            summaries.push(AuditSummary {
                property: q,
                n,
                d,
                m,
                trials: self.cfg.trials,
                passes,
                pass_rate: passes as f64 / self.cfg.trials as f64,
                worst_margin: worst.worst_margin,
                worst,
            });
            self.checks.push(Check::soft(
                q.name(),
                passes == self.cfg.trials,
                Some(format!("{passes} of {} trials pass", self.cfg.trials)),
            ));
        }
        self.results.audit = Some(summaries);
        Ok(())
    }

    fn kimvu(&mut self, x: Vertex, y: Vertex, avoid: &[Vertex]) -> Result<()> {
        let p = self.p().clone();
        let (xi, yi) = (to_index(x, p.n)?, to_index(y, p.n)?);
        let z = to_set(avoid, p.n)?;
        let prob = inclusion_probability(p.n, p.d, p.m)?;
        let seed = self.cfg.seed;
        let oracle = &self.oracle;
        let rows = run_trials(self.cfg.jobs, self.cfg.trials, |t| {
            let (_, k) = planted_pair(&p, seed, t, oracle)?;
            let stat = path_polynomial_stats(&k, &prob, xi, yi, p.k, &z)?;
            let one = path_polynomial_stats(&k, &num_rational::BigRational::from_integer(1.into()), xi, yi, p.k, &z)?;
            let full = SimpleGraph::complete(p.n);
            let q = PathQuery { f: &full, k: &k, x: xi, y: Some(yi), length: 2 * p.k, avoid: Some(&z), first: Default::default() };
            let agree = u128::from(one.paths) == q.count()?;
            Ok((kim_vu_report(p.n, p.d, stat), agree))
        })?;
        let agree = rows.iter().filter(|r| r.1).count();
        self.checks.push(Check::hard(
            "path_count_cross_check",
            agree == rows.len(),
            Some(format!("{agree} of {} instances agree at p = 1", rows.len())),
        ));
        self.results.kimvu = Some(rows.into_iter().map(|r| r.0).collect());
        Ok(())
    }

    fn schedule(&mut self, grid: Option<ScheduleGrid>) -> Result<()> {
        let rows = match grid {
            Some(g) => g.evaluate(),
            None => vec![schedule_mass(self.p())?],
        };
        let all = rows.iter().filter(|r| r.pass).count();
        self.checks.push(Check::soft("mass_within_budget", all == rows.len(), Some(format!("{all} of {} points", rows.len()))));
        let linear = rows.iter().all(|r| r.mass == r.c0 * r.unit_mass);
        self.checks.push(Check::hard("linear_in_scale", linear, None));
        self.results.schedule_mass = Some(rows);
        Ok(())
    }

    fn fit(&mut self, target: FitTarget) -> Result<()> {
        let p = self.p().clone();
        let seed = self.cfg.seed;
        let oracle = &self.oracle;
        let fit = match target {
            FitTarget::Upper | FitTarget::Lower => {
                if p.n > self.cfg.exact_ceiling {
                    return Err(Error::Capacity(format!("fit needs n <= exact ceiling {}", self.cfg.exact_ceiling)));
                }
                let family = oracle.complete_family(p.n, p.d)?;
                let graphs: Vec<SimpleGraph> = family.graphs().collect();
                let law = uniform_law(p.n, &graphs);
                let keys = run_trials(self.cfg.jobs, self.cfg.trials, |t| {
                    let mut tape = RandomnessTape::for_trial(p.n, seed, t);
                    let g = match target {
                        FitTarget::Upper => run_upper_deletion(&p, &mut tape, oracle, Backend::Auto)?.1,
                        _ => run_lower_addition(&p, &mut tape, oracle, Backend::Auto)?.1,
                    };
                    Ok(g.canonical_key())
                })?;
                let mut counts = SampleCounts::new();
                for k in keys {
                    *counts.entry(k).or_insert(0) += 1;
                }
                chi_square_uniformity(&counts, &law)?
            }
            FitTarget::GstarEdges => {
                let edges = run_trials(self.cfg.jobs, self.cfg.trials, |t| {
                    let mut tape = RandomnessTape::for_trial(p.n, seed, t);
                    Ok(run_gstar(&p, &mut tape)?.0.graph.edge_count() as u64)
                })?;
                let mut counts = BTreeMap::new();
                for e in edges {
                    *counts.entry(e).or_insert(0) += 1;
                }
                chi_square_binomial(&counts, p.pairs() as u64, p.p_upper())?
            }
        };
        let detail = Some(format!("chi2 = {:.4}, df = {}, p = {:.4e}", fit.statistic, fit.df, fit.p_value));
        match self.cfg.threshold {
            Some(alpha) => self.checks.push(Check::hard("fit", fit.p_value >= alpha, detail)),
            None => self.checks.push(Check::soft("fit", fit.p_value >= 1e-3, detail)),
        }
        self.results.chi_square = Some(fit);
        Ok(())
    }

    fn rate_check(&mut self, name: &str, rate: &RateEstimate) {
        let detail = Some(format!("{} of {}", rate.successes, rate.trials));
        match self.cfg.threshold {
            Some(min) => self.checks.push(Check::hard(name, rate.rate >= min, detail)),
            None => self.checks.push(Check::soft(name, true, detail)),
        }
    }

    fn upper(&mut self, p: ModelParams) -> Result<RateEstimate> {
        let seed = self.cfg.seed;
        let oracle = &self.oracle;
        let rows = run_trials(self.cfg.jobs, self.cfg.trials, |t| {
            let run = run_coupled_upper(&p, seed, t, oracle, Backend::Auto)?;
            let rep = verify_transcript_interleaving(&run)?;
            Ok(rep)
        })?;
        let count = |f: &dyn Fn(&crate::coupling::InterleavingReport) -> bool| rows.iter().filter(|r| f(r)).count() as u64;
        let summary = UpperSummary {
            contained: count(&|r| r.contained),
            interleaving_pass: count(&|r| r.pass),
            first_appearance_violations: rows.iter().map(|r| r.first_appearance.violations as u64).sum(),
            budget_holds: count(&|r| r.budget_holds),
            ratio_floor_holds: count(&|r| r.ratio_floor_holds),
            containment_forced: count(&|r| r.containment_forced),
        };
        let trials = self.cfg.trials;
        self.checks.push(Check::hard(
            &format!("interleaving_eps_{}", p.eps),
            summary.interleaving_pass == trials,
            Some(format!("{} of {trials} trials", summary.interleaving_pass)),
        ));
        let rate = RateEstimate::clopper_pearson(summary.contained, trials, self.cfg.confidence)?;
        self.rate_check(&format!("upper_containment_eps_{}", p.eps), &rate);
        self.results.upper = Some(summary);
        Ok(rate)
    }

    fn lower(&mut self, p: ModelParams) -> Result<RateEstimate> {
        let seed = self.cfg.seed;
        let oracle = &self.oracle;
        let rows = run_trials(self.cfg.jobs, self.cfg.trials, |t| {
            let run = run_coupled_lower(&p, seed, t, oracle, Backend::Auto)?;
            Ok((run.contained, run.ratio_floor_holds, run.reference_contained))
        })?;
        let summary = LowerSummary {
            contained: rows.iter().filter(|r| r.0).count() as u64,
            ratio_floor_holds: rows.iter().filter(|r| r.1).count() as u64,
            reference_contained: rows.iter().filter(|r| r.2).count() as u64,
            floor_violations: rows.iter().filter(|r| r.1 && !r.2).count() as u64,
        };
        self.checks.push(Check::hard(
            &format!("floor_implies_containment_eps_{}", p.eps),
            summary.floor_violations == 0,
            Some(format!("{} violations", summary.floor_violations)),
        ));
        let rate = RateEstimate::clopper_pearson(summary.contained, self.cfg.trials, self.cfg.confidence)?;
        self.rate_check(&format!("lower_containment_eps_{}", p.eps), &rate);
        self.results.lower = Some(summary);
        Ok(rate)
    }

    fn marginals(&mut self, direction: Option<Direction>) -> Result<()> {
        let p = self.p().clone();
        let dirs = direction.map_or_else(|| vec![Direction::Delete, Direction::Add], |d| vec![d]);
        let mut out = Vec::new();
        for dir in dirs {
            let check = verify_marginals(p.n, p.d, dir, &self.oracle, self.cfg.exact_ceiling)?;
            let name = match dir {
                Direction::Delete => "marginals_delete",
                Direction::Add => "marginals_add",
            };
            self.checks.push(Check::hard(name, check.pass, Some(format!("{} stages", check.steps.len()))));
            out.push(check);
        }
        self.results.marginal_check = Some(out);
        Ok(())
    }

    fn sweep(&mut self, eps: &[f64]) -> Result<()> {
        let mut rows = Vec::new();
        for &e in eps {
            let p = ModelParams { eps: e, ..self.p().clone() };
            let up = self.upper(p.clone())?;
            rows.push(SweepRow { eps: e, process: "upper".into(), rate: up });
            let lo = self.lower(p)?;
            rows.push(SweepRow { eps: e, process: "lower".into(), rate: lo });
        }
        // The per-eps summaries are folded into the rows.
        self.results.upper = None;
        self.results.lower = None;
        self.results.sweep = Some(rows);
        Ok(())
    }
}

/// Validates `config`, runs it and assembles the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let started = Instant::now();
    let mut runner = Runner { cfg: config, oracle: Oracle::default(), checks: Vec::new(), results: Results::default() };
    runner.run()?;
    let pass = runner.checks.iter().filter(|c| c.hard).all(|c| c.pass);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command: config.command.name().into(),
        params: config.params.clone(),
        trials: config.trials,
        seed: config.seed,
        config: config.clone(),
        checks: runner.checks,
        pass,
        results: runner.results,
        execution: Execution { jobs: config.jobs, wall_time_ms: started.elapsed().as_secs_f64() * 1e3 },
    })
}

/// One tidy measurement.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub command: String,
    pub measurement: String,
    pub label: String,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub m: Option<usize>,
    pub eps: Option<f64>,
    pub value: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

pub const PLOT_COLUMNS: [&str; 10] = ["command", "measurement", "label", "n", "d", "m", "eps", "value", "ci_lo", "ci_hi"];

/// Flattens a report into one row per measurement.
pub fn plot_rows(report: &Report) -> Vec<PlotRow> {
    let p = &report.params;
    let base = |measurement: &str, label: String, value: f64| PlotRow {
        command: report.command.clone(),
        measurement: measurement.into(),
        label,
        n: Some(p.n),
        d: Some(p.d),
        m: Some(p.m),
        eps: Some(p.eps),
        value,
        ..PlotRow::default()
    };
    let with_ci = |mut row: PlotRow, r: &RateEstimate| {
        row.ci_lo = Some(r.ci_lo);
        row.ci_hi = Some(r.ci_hi);
        row
    };
    let r = &report.results;
    let mut rows = Vec::new();
    if let Some(c) = &r.count {
        rows.push(base("count", c.host.to_literal(), c.count.parse::<f64>().unwrap_or(f64::NAN)));
    }
    if let Some(x) = &r.paths {
        rows.push(base("paths_between", format!("{}-{}", x.x, x.y), x.between as f64));
        rows.push(base("paths_from", x.x.to_string(), x.from_x as f64));
    }
    for s in r.switchings.iter().flatten() {
        let label = match s.level {
            Some(l) => format!("{:?}@{l}", s.kind),
            None => format!("{:?}", s.kind),
        };
        rows.push(base("switching_edges", label, s.report.edge_count as f64));
    }
    for a in r.audit.iter().flatten() {
        let row = |measurement: &str, value: f64| PlotRow { n: Some(a.n), d: Some(a.d), m: Some(a.m), ..base(measurement, a.property.name().into(), value) };
        rows.push(row("worst_margin", a.worst_margin.unwrap_or(f64::NAN)));
        rows.push(row("pass_rate", a.pass_rate));
    }
    for k in r.kimvu.iter().flatten() {
        rows.push(base("kimvu_relative_gap", String::new(), k.relative_gap));
    }
    for s in r.schedule_mass.iter().flatten() {
        let row = |measurement: &str, value: f64| PlotRow {
            n: Some(s.n),
            d: Some(s.d),
            m: None,
            eps: Some(s.eps),
            ..base(measurement, format!("c0={},mu={}", s.c0, s.mu), value)
        };
        rows.push(row("schedule_mass", s.mass));
        rows.push(row("half_slack", s.slack as f64 / 2.0));
    }
    if let Some(f) = &r.chi_square {
        rows.push(base("chi_square", String::new(), f.statistic));
        rows.push(base("p_value", String::new(), f.p_value));
    }
    if let Some(rate) = &r.containment_rate {
        rows.push(with_ci(base("containment", report.command.clone(), rate.rate), rate));
    }
    for mc in r.marginal_check.iter().flatten() {
        rows.push(base("marginals_exact", format!("{:?}", mc.direction), f64::from(u8::from(mc.pass))));
    }
    for s in r.sweep.iter().flatten() {
        let row = PlotRow { eps: Some(s.eps), ..base("containment", s.process.clone(), s.rate.rate) };
        rows.push(with_ci(row, &s.rate));
    }
    rows
}

/// Tidy CSV with the columns of [`PLOT_COLUMNS`]; a report without
/// measurements gives the header alone.
pub fn emit_plot_data(report: &Report) -> Result<String> {
    rows_to_csv(&plot_rows(report))
}

pub fn rows_to_csv(rows: &[PlotRow]) -> Result<String> {
    let io = |e: csv::Error| Error::Config(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(PLOT_COLUMNS).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}
