//! `sandwich`: runs one experiment and writes its report.
//!
//! Exit status: 0 when every hard check passes, 1 when one fails, 2 on a
//! usage or configuration error, 3 when the experiment itself errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use sandwich_core::audit::{Property, SearchConfig};
use sandwich_core::coupling::Direction;
use sandwich_core::harness::{emit_plot_data, FitTarget, OutputFormat, SwitchKind};
use sandwich_core::stats::ScheduleGrid;
use sandwich_core::switching::SixCycleMode;
use sandwich_core::{run_experiment, Command, EdgePair, Error, ExperimentConfig, SimpleGraph, Vertex};

#[derive(Debug, Parser)]
#[command(name = "sandwich", version, about = "Coupling experiments for random regular graphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    /// Omit to run the command stored in `--config`.
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Debug, Args)]
struct Global {
    /// JSON experiment configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads; the report does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `json` (full report) or `csv` (tidy plot data).
    #[arg(long, global = true, value_parser = enum_arg::<OutputFormat>)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Extra edges on top of the regular graph.
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    c0: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Half-length of switchings and path queries.
    #[arg(long, global = true)]
    ell: Option<usize>,
    /// Half-length of the path polynomial.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    exact_ceiling: Option<usize>,
    /// Confidence of reported rate intervals.
    #[arg(long, global = true)]
    confidence: Option<f64>,
    /// Makes soft metrics hard: minimum fit p-value or containment rate.
    #[arg(long, global = true)]
    threshold: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Exact |K_d(F)| and per-edge counts.
    Count {
        /// Host graph literal, e.g. `n=5;edges=1-2,2-3`; defaults to K_n.
        #[arg(long)]
        host: Option<SimpleGraph>,
    },
    /// Alternating x–y paths of length 2ℓ in (F, K).
    Paths {
        #[arg(long)]
        host: Option<SimpleGraph>,
        /// Regular spanning subgraph of the host; drawn uniformly if omitted.
        #[arg(long)]
        regular: Option<SimpleGraph>,
        #[arg(long)]
        x: Vertex,
        #[arg(long)]
        y: Vertex,
        /// Comma-separated vertices the path interior must avoid.
        #[arg(long, value_delimiter = ',')]
        avoid: Vec<Vertex>,
    },
    /// Switching graphs and their double-count check.
    Switchings {
        #[arg(long, value_parser = enum_arg::<SwitchKind>)]
        kind: SwitchKind,
        #[arg(long)]
        host: Option<SimpleGraph>,
        #[arg(long, default_value = "1-2")]
        e: EdgePair,
        #[arg(long, default_value = "3-4")]
        g: EdgePair,
        /// Window W of the six-cycle switchings.
        #[arg(long, value_delimiter = ',')]
        window: Vec<Vertex>,
        #[arg(long, value_parser = enum_arg::<SixCycleMode>)]
        mode: Option<SixCycleMode>,
    },
    /// Pseudorandomness properties of planted pairs (F, K).
    Audit {
        /// One property (e.g. `expansion-k`); all when omitted.
        #[arg(long)]
        property: Option<Property>,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        band_constant: f64,
        /// Drop the logarithmic divisor from the K-expansion bound.
        #[arg(long)]
        no_log_divisor: bool,
        /// Subsets enumerated exhaustively up to this size.
        #[arg(long, default_value_t = 3)]
        exhaustive_size: usize,
        /// Random subsets drawn beyond the exhaustive range.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Path-polynomial expectations and the concentration bound.
    Kimvu {
        #[arg(long)]
        x: Vertex,
        #[arg(long)]
        y: Vertex,
        #[arg(long, value_delimiter = ',')]
        avoid: Vec<Vertex>,
    },
    /// Expected rejections of the comparison process against R/2.
    ScheduleMass {
        /// Evaluate the built-in grid instead of the given parameters.
        #[arg(long)]
        grid: bool,
    },
    /// Chi-square fit of sampled graphs or edge counts.
    Fit {
        #[arg(long, value_parser = enum_arg::<FitTarget>, default_value = "upper")]
        target: FitTarget,
    },
    /// G ⊆ G* containment.
    CoupleUpper,
    /// G_* ⊆ G containment.
    CoupleLower,
    /// Exact kernel marginals against the closed forms.
    VerifyMarginals {
        #[arg(long, value_parser = enum_arg::<Direction>)]
        direction: Option<Direction>,
    },
    /// Both couplings over a list of eps values.
    Sweep {
        #[arg(long = "values", value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

/// Parses a snake_case serde enum, accepting `-` for `_`.
fn enum_arg<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

impl Sub {
    fn into_command(self) -> Command {
        match self {
            Sub::Count { host } => Command::Count { host },
            Sub::Paths { host, regular, x, y, avoid } => Command::Paths { host, regular, x, y, avoid },
            Sub::Switchings { kind, host, e, g, window, mode } => Command::Switchings { kind, host, e, g, window, mode },
            Sub::Audit { property, lambda, band_constant, no_log_divisor, exhaustive_size, samples } => Command::Audit {
                property,
                lambda,
                band_constant,
                log_divisor: !no_log_divisor,
                search: SearchConfig { exhaustive_size, samples, ..SearchConfig::default() },
            },
            Sub::Kimvu { x, y, avoid } => Command::Kimvu { x, y, avoid },
            Sub::ScheduleMass { grid } => Command::ScheduleMass { grid: grid.then(ScheduleGrid::default) },
            Sub::Fit { target } => Command::Fit { target },
            Sub::CoupleUpper => Command::CoupleUpper,
            Sub::CoupleLower => Command::CoupleLower,
            Sub::VerifyMarginals { direction } => Command::VerifyMarginals { direction },
            Sub::Sweep { values } => Command::Sweep { eps: values },
        }
    }
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, String> {
    let g = cli.global;
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    match cli.command {
        Some(sub) => cfg.command = sub.into_command(),
        None if g.config.is_none() => return Err("a subcommand or --config is required".into()),
        None => {}
    }
    // A graph literal fixes the order unless --n says otherwise.
    let literal_order = match &cfg.command {
        Command::Count { host } | Command::Switchings { host, .. } => host.as_ref().map(SimpleGraph::order),
        Command::Paths { host, regular, .. } => host.as_ref().or(regular.as_ref()).map(SimpleGraph::order),
        _ => None,
    };
    let p = &mut cfg.params;
    if let Some(n) = literal_order {
        p.n = n;
    }
    macro_rules! set {
        ($($src:ident => $dst:expr),* $(,)?) => { $(if let Some(v) = g.$src { $dst = v; })* };
    }
    set!(n => p.n, d => p.d, m => p.m, eps => p.eps, eta => p.eta, c0 => p.c0, mu => p.mu, ell => p.ell, k => p.k);
    set!(seed => cfg.seed, trials => cfg.trials, jobs => cfg.jobs, format => cfg.format,
         exact_ceiling => cfg.exact_ceiling, confidence => cfg.confidence);
    if g.threshold.is_some() {
        cfg.threshold = g.threshold;
    }
    if g.out.is_some() {
        cfg.out = g.out;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cfg = match build_config(Cli::parse()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e @ (Error::Config(_) | Error::InvalidParams(_) | Error::Parse(_) | Error::VertexOutOfRange { .. })) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let body = match cfg.format {
        OutputFormat::Json => report.to_json() + "\n",
        OutputFormat::Csv => match emit_plot_data(&report) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
        },
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{body}"),
    }
    for c in &report.checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        let kind = if c.hard { "hard" } else { "soft" };
        eprintln!("{verdict} [{kind}] {}{}", c.name, c.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default());
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
