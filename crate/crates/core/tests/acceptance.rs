//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured value, the pinned tolerance and the wall time against its budget.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! Pass a substring to run a subset (`cargo test --test acceptance -- 07`),
//! or `--pilot` to redo the containment pilot whose numbers are frozen below.

mod support;

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

use sandwich_core::coupling::{
    exact_marginal, run_coupled_lower, run_coupled_upper, run_gstar, run_upper_deletion,
    verify_marginals, verify_transcript_interleaving, Backend, Direction, DistributionTable,
};
use sandwich_core::graph::VertexSet;
use sandwich_core::harness::{planted_pair, run_trials};
use sandwich_core::oracle::{
    count_extensions, count_regular_spanning_subgraphs, count_with_edge, enumerate_extensions, enumerate_regular,
};
use sandwich_core::stats::{
    chi_square_binomial, chi_square_uniformity, path_polynomial_stats, schedule_mass, translation_check, PairPredicate,
    RateEstimate, SampleCounts, ScheduleGrid,
};
use sandwich_core::switching::{
    build_double_edge, build_single_edge, build_six_cycle, build_ten_cycle, six_cycle_statistic, verify_double_count,
    PathQuery, SixCycleMode, SwitchingGraph,
};
use sandwich_core::tape::RandomnessTape;
use sandwich_core::{EdgePair, ModelParams, Oracle, OracleConfig, SimpleGraph};

use support::Law;

/// Exact checks allow no deviation at all.
const EXACT: &str = "exact";
/// Significance of the distribution tests.
const ALPHA: f64 = 1e-3;
/// Share of calibration meta-runs in which a correct sampler must pass.
const CALIBRATION_FLOOR: f64 = 0.99;
/// Two-sided level of the frozen containment bands.
const BAND_CONFIDENCE: f64 = 0.999;
const CEILING: usize = 6;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--pilot") {
        pilot();
        return;
    }
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    let criteria = [
        Criterion { id: 1, title: "upper marginals n=5 d=2", budget: secs(10), run: c01_upper_marginals },
        Criterion { id: 2, title: "lower marginals n=5 d=2", budget: secs(10), run: c02_lower_marginals },
        Criterion { id: 3, title: "oracle identities on random hosts", budget: secs(60), run: c03_oracle_identities },
        Criterion { id: 4, title: "enumeration cardinalities", budget: secs(1), run: c04_cardinalities },
        Criterion { id: 5, title: "path counter equivalence", budget: secs(60), run: c05_path_counters },
        Criterion { id: 6, title: "switching audits d=3", budget: secs(120), run: c06_switchings },
        Criterion { id: 7, title: "sampler distribution tests", budget: secs(600), run: c07_distribution },
        Criterion { id: 8, title: "coupling containment regression", budget: secs(600), run: c08_containment },
        Criterion { id: 9, title: "first-appearance invariants", budget: secs(60), run: c09_transcripts },
        Criterion { id: 10, title: "schedule mass grid", budget: secs(10), run: c10_schedule_mass },
        Criterion { id: 11, title: "path polynomial at p=1", budget: secs(60), run: c11_kim_vu },
        Criterion { id: 12, title: "translation identity", budget: secs(60), run: c12_translation },
    ];
    let mut failed = Vec::new();
    let mut ran = 0;
    for c in &criteria {
        let tag = format!("{:02}", c.id);
        if !filters.is_empty() && !filters.iter().any(|f| tag.contains(f.as_str()) || c.title.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let out = (c.run)();
        let took = start.elapsed();
        let in_time = took <= c.budget;
        let pass = out.pass && in_time;
        println!(
            "criterion {tag} {} {}: {} [{:.2} s of {} s{}]",
            if pass { "PASS" } else { "FAIL" },
            c.title,
            out.detail,
            took.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { ", over budget" },
        );
        if !pass {
            failed.push(tag);
        }
    }
    println!("acceptance: {} of {ran} criteria pass", ran - failed.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}

fn to_law(t: &DistributionTable) -> Law {
    t.iter().map(|(g, p)| (g, p.clone())).collect()
}

fn marginals(dir: Direction) -> Outcome {
    let (n, d) = (5, 2);
    let o = Oracle::default();
    let check = match verify_marginals(n, d, dir, &o, CEILING) {
        Ok(c) => c,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    // Reference: brute-force counts, the chain iterated directly and the
    // closed forms scored directly.
    let steps = check.steps.len() - 1;
    let chain = match dir {
        Direction::Delete => support::deletion_chain(n, d, steps),
        Direction::Add => support::addition_chain(n, d, steps),
    };
    let mut agree = 0;
    for (i, reference) in chain.iter().enumerate() {
        let closed = match dir {
            Direction::Delete => support::upper_closed_form(n, d, 10 - i),
            Direction::Add => support::lower_closed_form(n, d, i),
        };
        let lib = exact_marginal(n, d, i, dir, &o, CEILING).map(|t| to_law(&t));
        if lib.as_ref() == Ok(reference) && *reference == closed {
            agree += 1;
        }
    }
    Outcome::new(
        check.pass && steps == 5 && agree == steps + 1,
        format!(
            "{} of {} stages equal the closed form, {agree} of {} match the reference chain ({EXACT})",
            check.steps.iter().filter(|s| s.matches_closed_form && s.total_is_one).count(),
            check.steps.len(),
            steps + 1
        ),
    )
}

fn c01_upper_marginals() -> Outcome {
    marginals(Direction::Delete)
}

fn c02_lower_marginals() -> Outcome {
    marginals(Direction::Add)
}

const HOSTS: usize = 1000;

fn c03_oracle_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut brute_checked = 0;
    for t in 0..HOSTS {
        let n = rng.random_range(4..=8);
        let d = loop {
            let d = rng.random_range(1..n.min(5));
            if (d * n) % 2 == 0 {
                break d;
            }
        };
        let f = support::random_graph(n, rng.random_range(0.5..1.0), &mut rng);
        let total = count_regular_spanning_subgraphs(&f, d).0;
        let edges: Vec<EdgePair> = f.edges().collect();
        let with: Vec<BigUint> = edges.iter().map(|&e| count_with_edge(&f, d, e).unwrap().0).collect();
        let double = with.iter().sum::<BigUint>() == &total * BigUint::from(d * n / 2);
        let dual = count_extensions(&f.complement(), n - 1 - d).0 == total;
        let split = edges
            .iter()
            .zip(&with)
            .all(|(&e, w)| count_regular_spanning_subgraphs(&f.without_edge(e).unwrap(), d).0 + w == total);
        // The brute-force counter is independent of the dynamic programme.
        let brute = if n <= 7 {
            brute_checked += 1;
            BigUint::from(support::brute_count(&f, d)) == total
        } else {
            true
        };
        if !(double && dual && split && brute) {
            failures.push(format!("host {t} ({f}, d={d}): double={double} dual={dual} split={split} brute={brute}"));
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{} of {HOSTS} hosts satisfy double count, complement duality and edge split; {brute_checked} also brute-forced ({EXACT}){}",
            HOSTS - failures.len(),
            failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    )
}

fn c04_cardinalities() -> Outcome {
    let fixture: serde_json::Value =
        serde_json::from_str(include_str!("fixtures/cardinalities.json")).expect("fixture parses");
    let mut rows = Vec::new();
    let mut pass = true;
    for row in fixture["counts"].as_array().unwrap() {
        let n = row["n"].as_u64().unwrap() as usize;
        let d = row["d"].as_u64().unwrap() as usize;
        let want = row["count"].as_u64().unwrap();
        let kn = SimpleGraph::complete(n);
        let dp = count_regular_spanning_subgraphs(&kn, d).to_u64();
        let listed = enumerate_regular(&kn, d, &OracleConfig::default()).map(|v| v.len() as u64).ok();
        let brute = support::brute_count(&kn, d);
        let ok = dp == Some(want) && listed == Some(want) && brute == want;
        pass &= ok;
        rows.push(format!("|K_{d}({n})| = {} (expected {want})", dp.map_or("?".into(), |c| c.to_string())));
    }
    Outcome::new(pass, format!("{} ({EXACT})", rows.join(", ")))
}

const PATH_INSTANCES: usize = 1000;

fn c05_path_counters() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = Vec::new();
    let mut nonzero = 0;
    for t in 0..PATH_INSTANCES {
        let n = rng.random_range(4..=10);
        let f = support::random_graph(n, rng.random_range(0.5..1.0), &mut rng);
        let mut k = SimpleGraph::empty(n);
        for e in f.edges() {
            if rng.random_bool(0.5) {
                k.add_edge(e).unwrap();
            }
        }
        let x = rng.random_range(0..n);
        let y = (x + rng.random_range(1..n)) % n;
        // A path with 2ℓ edges visits 2ℓ + 1 distinct vertices.
        let ell = rng.random_range(1..=((n - 1) / 2).min(4));
        let mut z = VertexSet::empty(n);
        let mut zmask = 0u32;
        for v in (0..n).filter(|&v| v != x && v != y) {
            if rng.random_bool(0.2) {
                z.insert(v);
                zmask |= 1 << v;
            }
        }
        let q = PathQuery { f: &f, k: &k, x, y: Some(y), length: 2 * ell, avoid: Some(&z), first: Default::default() };
        let a = q.count().expect("valid instance");
        let b = support::mitm_paths(&f, &k, x, y, ell, zmask);
        nonzero += usize::from(a > 0);
        if a != b {
            mismatches.push(format!("instance {t}: {a} vs {b}"));
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!(
            "{} of {PATH_INSTANCES} instances agree ({nonzero} with paths) ({EXACT}){}",
            PATH_INSTANCES - mismatches.len(),
            mismatches.first().map(|m| format!("; first mismatch {m}")).unwrap_or_default()
        ),
    )
}

struct Audit {
    graphs: usize,
    edges: usize,
    failures: Vec<String>,
}

impl Audit {
    fn add(&mut self, label: String, sg: &SwitchingGraph, host: &SimpleGraph, base: Option<&SimpleGraph>) {
        let rep = verify_double_count(sg);
        let members = sg.left.iter().chain(&sg.right).all(|k| {
            k.is_regular(sg.d) && k.is_subgraph_of(host) && base.is_none_or(|b| b.is_subgraph_of(k))
        });
        self.graphs += 1;
        self.edges += rep.edge_count;
        if !(rep.pass && members) {
            self.failures.push(format!("{label}: double count {}, members {members}", rep.pass));
        }
    }
}

/// A host on `n` vertices with a manageable number of cubic spanning subgraphs:
/// a Hamilton cycle plus all chords of length at most `reach`.
fn circulant(n: usize, reach: usize) -> SimpleGraph {
    let mut g = SimpleGraph::empty(n);
    for v in 0..n {
        for s in 1..=reach {
            g.add_edge(EdgePair::new(v, (v + s) % n).unwrap()).unwrap();
        }
    }
    g
}

fn c06_switchings() -> Outcome {
    let d = 3;
    let cfg = OracleConfig::default();
    let e = |a, b| EdgePair::new(a, b).unwrap();
    let mut audit = Audit { graphs: 0, edges: 0, failures: Vec::new() };
    let mut run = || -> sandwich_core::Result<()> {
        for n in [6usize, 8, 10] {
            // L_e and L_{e,f}: K_n for n <= 8, a circulant host at n = 10.
            let host = if n <= 8 { SimpleGraph::complete(n) } else { circulant(n, 3) };
            let ells: &[usize] = if n == 6 { &[1, 2] } else { &[1] };
            for &ell in ells {
                audit.add(format!("L_e n={n} ell={ell}"), &build_single_edge(&host, d, e(0, 1), ell, &cfg)?, &host, None);
            }
            audit.add(format!("L_ef n={n}"), &build_double_edge(&host, d, e(0, 1), e(2, 3), 0, &cfg)?, &host, None);
            // Ten-cycles: extensions of a fixed subgraph; a Hamilton cycle at n = 10.
            let base = if n == 10 { circulant(n, 1) } else { SimpleGraph::empty(n) };
            let full = SimpleGraph::complete(n);
            audit.add(format!("10-cycle n={n}"), &build_ten_cycle(&base, d, e(0, n / 2), e(1, n / 2 + 1), &cfg)?, &full, Some(&base));
            // Six-cycles: every consecutive pair of levels of the statistic.
            let family = enumerate_regular(&host, d, &cfg)?;
            let w = VertexSet::from_vertices(n, 0..n / 2)?;
            for mode in [SixCycleMode::TwoIn, SixCycleMode::OneIn] {
                let levels: std::collections::BTreeSet<i64> =
                    family.iter().map(|k| six_cycle_statistic(k, &w, mode)).collect();
                for &level in levels.iter().filter(|&&l| levels.contains(&(l - 1))) {
                    let sg = build_six_cycle(&host, &family, d, &w, mode, level)?;
                    audit.add(format!("6-cycle n={n} {mode:?} level {level}"), &sg, &host, None);
                }
            }
        }
        // Ten-cycle switchings need ten vertices: make sure one level is populated.
        let base = circulant(10, 1);
        let ext = enumerate_extensions(&base, d, &cfg)?;
        if !ext.iter().any(|k| k.has_edge(e(0, 5))) {
            audit.failures.push("10-cycle n=10 has an empty side".into());
        }
        Ok(())
    };
    if let Err(err) = run() {
        return Outcome::new(false, format!("error: {err}"));
    }
    Outcome::new(
        audit.failures.is_empty(),
        format!(
            "{} of {} switching graphs ({} switch edges) regular, host-contained and double-counted ({EXACT}){}",
            audit.graphs - audit.failures.len(),
            audit.graphs,
            audit.edges,
            audit.failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    )
}

const SAMPLER_TRIALS: u64 = 100_000;
const META_RUNS: usize = 100;

fn uniform_law(n: usize, graphs: &[SimpleGraph]) -> DistributionTable {
    let p = BigRational::new(BigInt::from(1), BigInt::from(graphs.len()));
    DistributionTable { n, probs: graphs.iter().map(|g| (g.canonical_key(), p.clone())).collect() }
}

fn c07_distribution() -> Outcome {
    let params = ModelParams::new(6, 3);
    let o = Oracle::default();
    let graphs = enumerate_regular(&SimpleGraph::complete(6), 3, &OracleConfig::default()).unwrap();
    let law = uniform_law(6, &graphs);

    // Calibration: an ideal uniform sampler over the same cells and sample size.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let keys: Vec<_> = law.probs.keys().cloned().collect();
    let mut calibrated = 0;
    for _ in 0..META_RUNS {
        let mut counts = SampleCounts::new();
        for _ in 0..SAMPLER_TRIALS {
            *counts.entry(keys[rng.random_range(0..keys.len())].clone()).or_insert(0) += 1;
        }
        calibrated += usize::from(chi_square_uniformity(&counts, &law).unwrap().p_value >= ALPHA);
    }
    let calibration_ok = calibrated as f64 >= CALIBRATION_FLOOR * META_RUNS as f64;

    let sampled = run_trials(1, SAMPLER_TRIALS, |t| {
        let mut tape = RandomnessTape::for_trial(6, 7, t);
        Ok(run_upper_deletion(&params, &mut tape, &o, Backend::Auto)?.1.canonical_key())
    });
    let fit = sampled.and_then(|keys| {
        let mut counts = SampleCounts::new();
        for k in keys {
            *counts.entry(k).or_insert(0) += 1;
        }
        chi_square_uniformity(&counts, &law)
    });
    let edges = run_trials(1, SAMPLER_TRIALS, |t| {
        let mut tape = RandomnessTape::for_trial(6, 8, t);
        Ok(run_gstar(&params, &mut tape)?.0.graph.edge_count() as u64)
    });
    let binomial_fit = edges.and_then(|e| {
        let mut counts = std::collections::BTreeMap::new();
        for v in e {
            *counts.entry(v).or_insert(0) += 1;
        }
        chi_square_binomial(&counts, params.pairs() as u64, params.p_upper())
    });
    match (fit, binomial_fit) {
        (Ok(fit), Ok(bin)) => Outcome::new(
            calibration_ok && fit.p_value >= ALPHA && bin.p_value >= ALPHA,
            format!(
                "uniform on 70 cubic graphs: chi2 {:.1} df {} p {:.3}; G* edges vs Bin({}, {:.2}): chi2 {:.2} df {} p {:.3}; \
                 alpha {ALPHA}; ideal sampler passed {calibrated}/{META_RUNS} meta-runs (floor {CALIBRATION_FLOOR})",
                fit.statistic,
                fit.df,
                fit.p_value,
                params.pairs(),
                params.p_upper(),
                bin.statistic,
                bin.df,
                bin.p_value
            ),
        ),
        (a, b) => Outcome::new(false, format!("error: {:?} / {:?}", a.err(), b.err())),
    }
}

fn containment_params() -> ModelParams {
    ModelParams { eps: 0.9, eta: 0.1, ..ModelParams::new(8, 3) }
}

const PILOT_SEED: u64 = 1;
const PILOT_TRIALS: u64 = 20_000;
/// Frozen pilot outcome (successes out of `PILOT_TRIALS`), seed `PILOT_SEED`.
const PILOT_UPPER: u64 = 8_229;
const PILOT_LOWER: u64 = 15_016;
const REGRESSION_SEED: u64 = 7;
const REGRESSION_TRIALS: u64 = 2_000;

fn containment_counts(seed: u64, trials: u64) -> sandwich_core::Result<(u64, u64)> {
    let p = containment_params();
    let o = Oracle::default();
    let up = run_trials(1, trials, |t| Ok(run_coupled_upper(&p, seed, t, &o, Backend::Auto)?.contained))?;
    let lo = run_trials(1, trials, |t| Ok(run_coupled_lower(&p, seed, t, &o, Backend::Auto)?.contained))?;
    Ok((up.iter().filter(|&&c| c).count() as u64, lo.iter().filter(|&&c| c).count() as u64))
}

/// Range of counts in `trials` runs compatible with the pilot: the exact
/// binomial quantiles at both ends of the pilot's Clopper–Pearson interval.
fn band(pilot: u64, trials: u64) -> (RateEstimate, u64, u64) {
    let ci = RateEstimate::clopper_pearson(pilot, PILOT_TRIALS, BAND_CONFIDENCE).unwrap();
    let tail = (1.0 - BAND_CONFIDENCE) / 2.0;
    let lo = Binomial::new(ci.ci_lo, trials).unwrap().inverse_cdf(tail);
    let hi = Binomial::new(ci.ci_hi, trials).unwrap().inverse_cdf(1.0 - tail);
    (ci, lo, hi)
}

fn c08_containment() -> Outcome {
    let (up, lo) = match containment_counts(REGRESSION_SEED, REGRESSION_TRIALS) {
        Ok(c) => c,
        Err(e) => return Outcome::new(false, format!("error: {e}")),
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, pilot, got) in [("G ⊆ G*", PILOT_UPPER, up), ("G_* ⊆ G", PILOT_LOWER, lo)] {
        let (ci, a, b) = band(pilot, REGRESSION_TRIALS);
        let rate = RateEstimate::clopper_pearson(got, REGRESSION_TRIALS, BAND_CONFIDENCE).unwrap();
        let ok = (a..=b).contains(&got);
        pass &= ok;
        parts.push(format!(
            "{name} {got}/{REGRESSION_TRIALS} = {:.4} [{:.4}, {:.4}] vs pilot {:.4} [{:.4}, {:.4}], band {a}..={b}",
            rate.rate, rate.ci_lo, rate.ci_hi, ci.rate, ci.ci_lo, ci.ci_hi
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn pilot() {
    let (up, lo) = containment_counts(PILOT_SEED, PILOT_TRIALS).expect("pilot runs");
    for (name, c) in [("upper", up), ("lower", lo)] {
        let r = RateEstimate::clopper_pearson(c, PILOT_TRIALS, BAND_CONFIDENCE).unwrap();
        println!("pilot {name}: {c}/{PILOT_TRIALS} = {:.4} [{:.4}, {:.4}]", r.rate, r.ci_lo, r.ci_hi);
    }
}

fn c09_transcripts() -> Outcome {
    let o = Oracle::default();
    // n = 10 needs a DP count per pair and stage (about 3 s per trial), hence fewer trials.
    let settings = [(6, 3, 0.9, 500), (8, 3, 0.9, 500), (8, 3, 0.5, 500), (8, 2, 0.9, 500), (10, 3, 0.9, 5)];
    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut trials = 0u64;
    let mut errors = Vec::new();
    for (n, d, eps, count) in settings {
        let p = ModelParams { eps, ..ModelParams::new(n, d) };
        match run_trials(1, count, |t| {
            verify_transcript_interleaving(&run_coupled_upper(&p, 9, t, &o, Backend::Auto)?)
        }) {
            Ok(reports) => {
                trials += reports.len() as u64;
                for r in reports {
                    checked += r.first_appearance.checked;
                    violations += r.first_appearance.violations;
                }
            }
            Err(e) => errors.push(format!("n={n} d={d} eps={eps}: {e}")),
        }
    }
    Outcome::new(
        violations == 0 && errors.is_empty(),
        format!(
            "{violations} violations of k(i) <= l(i), m(i) over {checked} stages in {trials} trials ({} settings){}",
            settings.len(),
            errors.first().map(|e| format!("; error {e}")).unwrap_or_default()
        ),
    )
}

/// Relative tolerance between the library sum and the reference sum, which
/// add the same terms in the same order.
const MASS_TOLERANCE: f64 = 1e-12;

fn c10_schedule_mass() -> Outcome {
    let grid = ScheduleGrid::default();
    let rows = grid.evaluate();
    let mut worst = 0.0f64;
    let mut linear = true;
    for r in &rows {
        let (reference, slack) = support::schedule_sum(r.n, r.d, r.eps, r.c0, r.mu);
        worst = worst.max((r.mass - reference).abs() / reference.abs().max(f64::MIN_POSITIVE));
        linear &= slack == r.slack && r.pass == (r.mass <= r.slack as f64 / 2.0);
        let unit = schedule_mass(&ModelParams { c0: 1.0, n: r.n, d: r.d, eps: r.eps, mu: r.mu, ..ModelParams::default() })
            .unwrap();
        linear &= r.mass == r.c0 * unit.mass;
    }
    let passing = rows.iter().filter(|r| r.pass).count();
    Outcome::new(
        worst <= MASS_TOLERANCE && linear && !rows.is_empty(),
        format!(
            "{} grid points, E_S <= R/2 at {passing}; max relative gap to reference {worst:.1e} (tol {MASS_TOLERANCE:.0e}); \
             E_S(C0) = C0 E_S(1) {}",
            rows.len(),
            if linear { "exactly" } else { "violated" }
        ),
    )
}

const KIMVU_INSTANCES: u64 = 100;

fn c11_kim_vu() -> Outcome {
    let o = Oracle::default();
    let one = BigRational::from_integer(BigInt::from(1));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mismatches = Vec::new();
    let mut paths = 0u128;
    for t in 0..KIMVU_INSTANCES {
        let n = [6, 8, 10][rng.random_range(0..3)];
        let k_half = rng.random_range(1..=if n == 10 { 3 } else { 4 });
        let k = if n < 10 {
            let p = ModelParams { m: 1, ..ModelParams::new(n, 3) };
            match planted_pair(&p, 11, t, &o) {
                Ok((_, k)) => k,
                Err(e) => return Outcome::new(false, format!("error: {e}")),
            }
        } else {
            support::shuffled_cubic(n, &mut rng)
        };
        let ends = sample(&mut rng, n, 2);
        let (x, y) = (ends.index(0), ends.index(1));
        let mut z = VertexSet::empty(n);
        for v in (0..n).filter(|&v| v != x && v != y) {
            if rng.random_bool(0.15) {
                z.insert(v);
            }
        }
        let stat = match path_polynomial_stats(&k, &one, x, y, k_half, &z) {
            Ok(s) => s,
            Err(e) => return Outcome::new(false, format!("instance {t}: {e}")),
        };
        let full = SimpleGraph::complete(n);
        let q = PathQuery { f: &full, k: &k, x, y: Some(y), length: 2 * k_half, avoid: Some(&z), first: Default::default() };
        let exact = q.count().unwrap();
        paths += exact;
        if u128::from(stat.paths) != exact || stat.e_y != BigRational::from_integer(BigInt::from(exact)) {
            mismatches.push(format!("instance {t}: E Y {} vs {exact}", stat.e_y));
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!(
            "{} of {KIMVU_INSTANCES} instances have E Y equal to the alternating path count ({paths} paths in total) ({EXACT}){}",
            KIMVU_INSTANCES - mismatches.len() as u64,
            mismatches.first().map(|m| format!("; first mismatch {m}")).unwrap_or_default()
        ),
    )
}

fn c12_translation() -> Outcome {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let one = BigRational::from_integer(BigInt::from(1));
    // Derived by hand: the 2-regular graphs on five vertices are the twelve
    // 5-cycles, whose complements are 5-cycles as well; two of those five
    // non-edges share a vertex in five of the ten choices.
    let cases = [
        (PairPredicate::KContains { edge: EdgePair::new(0, 1).unwrap() }, half.clone()),
        (PairPredicate::ExtraIsMatching, half.clone()),
        (PairPredicate::MaxDegreeAtMost { bound: 3 }, half),
        (PairPredicate::NoClosedCherry, one),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (pred, expected) in cases {
        match translation_check(5, 2, 2, &pred, &[0.5], CEILING) {
            Ok(r) => {
                let ok = r.identity_holds && r.planted_probability == expected;
                pass &= ok;
                parts.push(format!("{pred:?}: {} = {} ({})", r.planted_probability, r.translated_probability, if ok { "ok" } else { "mismatch" }));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{pred:?}: error {e}"));
            }
        }
    }
    Outcome::new(pass, format!("n=5 d=2 m=2, {} ({EXACT})", parts.join("; ")))
}
