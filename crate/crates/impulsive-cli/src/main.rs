//! Command-line front end: runs simulations, entropy sweeps, hypothesis
//! checks and quotient-metric tables, and writes machine-readable results.
//!
//! Outputs are deterministic for a fixed seed; every file is stamped with
//! the library version and a hash of the effective configuration. Exit
//! codes: 0 success, 2 configuration error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use impulsive::entropy::{self, Mode};
use impulsive::impulse::Dynamics;
use impulsive::quotient::Quotient;
use impulsive::systems::{self, ExampleSpec};
use impulsive::timefns::{self, TimeSequence};
use impulsive::{Error, Point, Result};

mod output;

use output::{fmt_sig, OutputStamp};

#[derive(Parser)]
#[command(name = "impulsive", version, about = "Impulsive semiflow experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one trajectory and write it as CSV (with impulse flags).
    Simulate(SimulateArgs),
    /// Separated-count entropy sweep; writes CSV rows and a JSON summary.
    Entropy(EntropyArgs),
    /// Sampled verification of the standing hypotheses.
    Check(CheckArgs),
    /// Quotient distance tables (direct metric, collapse formula, chains).
    Quotient(QuotientArgs),
    /// List built-in systems or show one system's reference values.
    Example(ExampleArgs),
    /// Run a JSON experiment configuration.
    Run(RunArgs),
}

#[derive(Args)]
struct SystemArgs {
    /// Built-in system name (see `example list`).
    #[arg(long)]
    example: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Start point coordinates, comma separated, e.g. "0,1.5".
    #[arg(long)]
    start: String,
    /// Horizon.
    #[arg(long = "T")]
    horizon: f64,
    /// Output sampling step.
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Orbit CSV path.
    #[arg(long, default_value = "orbit.csv")]
    out: PathBuf,
    /// Also write the impulse/visit/merged event times of the start point.
    #[arg(long)]
    sequences: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Counting mode: classical or tau (windowed).
    #[arg(long, default_value = "classical")]
    mode: String,
    /// Horizon grid, comma separated, strictly increasing.
    #[arg(long = "T", value_delimiter = ',')]
    t_grid: Vec<f64>,
    /// Epsilon grid, comma separated, strictly decreasing.
    #[arg(long = "eps", value_delimiter = ',')]
    eps_grid: Vec<f64>,
    /// Delta grid (tau mode), comma separated, strictly decreasing.
    #[arg(long = "delta", value_delimiter = ',')]
    delta_grid: Vec<f64>,
    /// Sample size (deterministic grid sampler).
    #[arg(long, default_value_t = 400)]
    samples: usize,
    /// Event times defining the blackout windows in tau mode:
    /// auto | impulse | section | merged.
    #[arg(long, default_value = "auto")]
    tau_source: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "entropy.csv")]
    out_csv: PathBuf,
    #[arg(long, default_value = "entropy.json")]
    out_json: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "check.json")]
    out: PathBuf,
}

#[derive(Args)]
struct QuotientArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Number of sampled point pairs.
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    /// Chain-search pool size.
    #[arg(long, default_value_t = 200)]
    pool: usize,
    #[arg(long, default_value_t = 3)]
    max_chain: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "quotient.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ExampleArgs {
    /// `list`, or `describe <name>`.
    #[arg(value_name = "ACTION")]
    action: String,
    #[arg(value_name = "NAME")]
    name: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
}

/// A complete experiment description; the flag-based subcommands build the
/// equivalent structure internally so both paths share one hash and one
/// execution route.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct ExperimentConfig {
    system: SystemConfig,
    command: String,
    #[serde(default)]
    params: ParamsConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum SystemConfig {
    Name(String),
    AnnulusFamily {
        family: String,
        offset: f64,
        slope: f64,
        angle: f64,
        xi: f64,
    },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pool: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_chain: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out_json: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sequences: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::InvalidConfig(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate(args) => {
            let config = ExperimentConfig {
                system: SystemConfig::Name(args.system.example.clone()),
                command: "simulate".into(),
                params: ParamsConfig {
                    start: Some(parse_coords(&args.start)?),
                    horizon: Some(args.horizon),
                    step: Some(args.step),
                    seed: Some(args.seed),
                    out: Some(args.out.display().to_string()),
                    sequences: args.sequences.map(|p| p.display().to_string()),
                    ..Default::default()
                },
            };
            run_config(&config)
        }
        Command::Entropy(args) => {
            let config = ExperimentConfig {
                system: SystemConfig::Name(args.system.example.clone()),
                command: "entropy".into(),
                params: ParamsConfig {
                    t_grid: Some(args.t_grid),
                    epsilon_grid: Some(args.eps_grid),
                    delta_grid: if args.delta_grid.is_empty() {
                        None
                    } else {
                        Some(args.delta_grid)
                    },
                    mode: Some(args.mode),
                    tau_source: Some(args.tau_source),
                    samples: Some(args.samples),
                    seed: Some(args.seed),
                    out_csv: Some(args.out_csv.display().to_string()),
                    out_json: Some(args.out_json.display().to_string()),
                    ..Default::default()
                },
            };
            run_config(&config)
        }
        Command::Check(args) => {
            let config = ExperimentConfig {
                system: SystemConfig::Name(args.system.example.clone()),
                command: "check".into(),
                params: ParamsConfig {
                    samples: Some(args.samples),
                    seed: Some(args.seed),
                    out: Some(args.out.display().to_string()),
                    ..Default::default()
                },
            };
            run_config(&config)
        }
        Command::Quotient(args) => {
            let config = ExperimentConfig {
                system: SystemConfig::Name(args.system.example.clone()),
                command: "quotient".into(),
                params: ParamsConfig {
                    pairs: Some(args.pairs),
                    pool: Some(args.pool),
                    max_chain: Some(args.max_chain),
                    seed: Some(args.seed),
                    out: Some(args.out.display().to_string()),
                    ..Default::default()
                },
            };
            run_config(&config)
        }
        Command::Example(args) => run_example(&args),
        Command::Run(args) => {
            let text = std::fs::read_to_string(&args.config).map_err(|e| {
                Error::InvalidConfig(format!("cannot read {}: {e}", args.config.display()))
            })?;
            let config: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("config parse: {e}")))?;
            run_config(&config)
        }
    }
}

fn parse_coords(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidConfig(format!("bad coordinate '{c}': {e}")))
        })
        .collect()
}

fn load_system(config: &SystemConfig) -> Result<(ExampleSpec, String)> {
    match config {
        SystemConfig::Name(name) => Ok((systems::by_name(name)?, name.clone())),
        SystemConfig::AnnulusFamily {
            family,
            offset,
            slope,
            angle,
            xi,
        } => {
            if family != "annulus" {
                return Err(Error::InvalidConfig(format!(
                    "unknown system family '{family}'"
                )));
            }
            let sys = systems::annulus_family(*offset, *slope, *angle, *xi)?;
            let mut spec = systems::annulus();
            spec.dynamics = Dynamics::Impulsive(Arc::new(sys));
            spec.facts.clear(); // reference values hold only for the default map
            Ok((
                spec,
                format!("annulus-family({offset},{slope},{angle},{xi})"),
            ))
        }
    }
}

fn run_config(config: &ExperimentConfig) -> Result<()> {
    // Output locations do not change what is computed; keep them out of the
    // stamp so identical experiments hash identically wherever they write.
    let mut hashed = config.clone();
    hashed.params.out = None;
    hashed.params.out_csv = None;
    hashed.params.out_json = None;
    hashed.params.sequences = None;
    let stamp = OutputStamp::new(&hashed)?;
    let (spec, label) = load_system(&config.system)?;
    match config.command.as_str() {
        "simulate" => cmd_simulate(config, &spec, &label, &stamp),
        "entropy" => cmd_entropy(config, &spec, &label, &stamp),
        "check" => cmd_check(config, &spec, &label, &stamp),
        "quotient" => cmd_quotient(config, &spec, &label, &stamp),
        other => Err(Error::InvalidConfig(format!(
            "unknown command '{other}' (simulate, entropy, check, quotient)"
        ))),
    }
}

fn run_example(args: &ExampleArgs) -> Result<()> {
    match args.action.as_str() {
        "list" => {
            for name in systems::names() {
                let spec = systems::by_name(name)?;
                println!("{name}: {}", spec.summary);
            }
            Ok(())
        }
        "describe" => {
            let name = args
                .name
                .as_deref()
                .ok_or_else(|| Error::InvalidConfig("example describe <name>".into()))?;
            let spec = systems::by_name(name)?;
            println!("{}: {}", spec.name, spec.summary);
            println!("{:<22} {:>18} {:>9}  basis", "fact", "value", "tol");
            for fact in &spec.facts {
                println!(
                    "{:<22} {:>18} {:>9}  {}",
                    fact.name,
                    fmt_sig(fact.value),
                    format!("{:.0e}", fact.tolerance),
                    fact.basis
                );
            }
            Ok(())
        }
        other => Err(Error::InvalidConfig(format!(
            "unknown example action '{other}' (list, describe)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(
    config: &ExperimentConfig,
    spec: &ExampleSpec,
    label: &str,
    stamp: &OutputStamp,
) -> Result<()> {
    let params = &config.params;
    let start_coords = params
        .start
        .clone()
        .ok_or_else(|| Error::InvalidConfig("simulate requires params.start".into()))?;
    let horizon = params
        .horizon
        .ok_or_else(|| Error::InvalidConfig("simulate requires params.horizon".into()))?;
    if horizon <= 0.0 {
        return Err(Error::InvalidConfig("horizon must be positive".into()));
    }
    let step = params.step.unwrap_or(0.05);
    let space = spec.dynamics.space().clone();
    let start = space
        .point(&start_coords)
        .map_err(|e| Error::InvalidConfig(format!("start point: {e}")))?;

    // Sample rows plus one row exactly at each impulse time (post-jump
    // state, impulse flag set).
    let mut rows: Vec<(f64, Point, bool)> = Vec::new();
    let impulse_times: Vec<f64> = match &spec.dynamics {
        Dynamics::Impulsive(sys) => sys.impulse_times(&start, horizon)?,
        Dynamics::Flow(_) => Vec::new(),
    };
    let orbit = spec.dynamics.orbit(&start, horizon)?;
    let n = (horizon / step).ceil() as usize;
    for i in 0..=n {
        let t = (i as f64 * step).min(horizon);
        if impulse_times.iter().any(|&tau| (tau - t).abs() <= 1e-12) {
            continue;
        }
        rows.push((t, orbit.point_at(t), false));
    }
    for &tau in &impulse_times {
        rows.push((tau, orbit.point_at(tau), true));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));

    let out = output::resolve(params.out.as_deref().unwrap_or("orbit.csv"));
    let mut w = output::csv_writer(&out, stamp, label)?;
    let dim = space.dimension();
    let mut header = vec!["t".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    header.push("impulse".into());
    w.write_record(&header).map_err(csv_err)?;
    for (t, p, jump) in &rows {
        let mut record = vec![fmt_sig(*t)];
        record.extend(p.coords().iter().map(|&c| fmt_sig(c)));
        record.push(if *jump { "1".into() } else { "0".into() });
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::numerical(e.to_string()))?;
    println!(
        "simulate {label}: {} rows, {} impulses -> {}",
        rows.len(),
        impulse_times.len(),
        out.display()
    );

    if let Some(seq_path) = &params.sequences {
        write_sequences(spec, &start, horizon, seq_path, stamp, label)?;
    }
    Ok(())
}

fn write_sequences(
    spec: &ExampleSpec,
    start: &Point,
    horizon: f64,
    path: &str,
    stamp: &OutputStamp,
    label: &str,
) -> Result<()> {
    let out = output::resolve(path);
    let mut w = output::csv_writer(&out, stamp, label)?;
    w.write_record(["kind", "point", "times"])
        .map_err(csv_err)?;
    let point_repr = start
        .coords()
        .iter()
        .map(|&c| fmt_sig(c))
        .collect::<Vec<_>>()
        .join(" ");
    let mut write_seq = |kind: &str, seq: &TimeSequence| {
        let times = seq
            .times()
            .iter()
            .map(|&t| fmt_sig(t))
            .collect::<Vec<_>>()
            .join(" ");
        w.write_record([kind, &point_repr, &times]).map_err(csv_err)
    };
    match &spec.dynamics {
        Dynamics::Impulsive(sys) => {
            let tau = timefns::impulse_sequence(sys, start, horizon)?;
            let theta = timefns::visit_sequence(sys, start, horizon)?;
            let merged = timefns::merge(&tau, &theta)?;
            write_seq("impulse", &tau)?;
            write_seq("visit", &theta)?;
            write_seq("merged", &merged)?;
        }
        Dynamics::Flow(flow) => {
            if let Some(section) = &spec.section {
                let seq =
                    timefns::section_sequence(flow, section, spec.section_gap, start, horizon)?;
                write_seq("section", &seq)?;
            }
        }
    }
    w.flush().map_err(|e| Error::numerical(e.to_string()))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// entropy
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EntropySummary<'a> {
    version: &'a str,
    config_hash: String,
    system: &'a str,
    mode: &'a str,
    seed: u64,
    samples: usize,
    t_grid: &'a [f64],
    epsilon_grid: &'a [f64],
    delta_grid: &'a [f64],
    cells: Vec<CellSummary>,
    reported_slope: f64,
    stable: bool,
    saturated: bool,
    eps_monotone: bool,
}

#[derive(Serialize)]
struct CellSummary {
    epsilon: f64,
    delta: f64,
    slope: f64,
    intercept: f64,
    degenerate: bool,
    counts: Vec<(f64, usize)>,
}

fn cmd_entropy(
    config: &ExperimentConfig,
    spec: &ExampleSpec,
    label: &str,
    stamp: &OutputStamp,
) -> Result<()> {
    let params = &config.params;
    let t_grid = params
        .t_grid
        .clone()
        .ok_or_else(|| Error::InvalidConfig("entropy requires params.t_grid".into()))?;
    let eps_grid = params
        .epsilon_grid
        .clone()
        .ok_or_else(|| Error::InvalidConfig("entropy requires params.epsilon_grid".into()))?;
    let mode = match params.mode.as_deref().unwrap_or("classical") {
        "classical" => Mode::Classical,
        "tau" => Mode::Tau,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown mode '{other}' (classical, tau)"
            )))
        }
    };
    let delta_grid = params.delta_grid.clone().unwrap_or_default();
    if mode == Mode::Tau && delta_grid.is_empty() {
        return Err(Error::InvalidConfig(
            "tau mode requires params.delta_grid".into(),
        ));
    }
    if t_grid.len() < 4 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "t_grid needs at least 4 strictly increasing entries".into(),
        ));
    }
    if eps_grid.is_empty() || eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig(
            "epsilon_grid must be strictly decreasing".into(),
        ));
    }
    let samples = params.samples.unwrap_or(400);
    let seed = params.seed.unwrap_or(7);
    let sample = spec.grid(samples);

    let dynamics = spec.dynamics.clone();
    let builder = tau_builder(spec, params.tau_source.as_deref().unwrap_or("auto"))?;
    let table = entropy::entropy_sweep(
        &dynamics,
        &sample,
        &t_grid,
        &eps_grid,
        &delta_grid,
        mode,
        None,
        builder.as_deref(),
    )?;

    // CSV: one row per (mode, T, eps, delta) with the running slope.
    let out_csv = output::resolve(params.out_csv.as_deref().unwrap_or("entropy.csv"));
    let mut w = output::csv_writer(&out_csv, stamp, label)?;
    w.write_record(["mode", "T", "epsilon", "delta", "count", "slope_so_far"])
        .map_err(csv_err)?;
    let mode_name = match mode {
        Mode::Classical => "classical",
        Mode::Tau => "tau",
    };
    for cell in &table.cells {
        for k in 0..cell.estimate.counts.len() {
            let prefix: Vec<(f64, usize)> = cell.estimate.counts[..=k].to_vec();
            let slope_so_far = if prefix.len() >= 4 {
                fmt_sig(entropy::fit_counts(prefix).slope)
            } else {
                String::new()
            };
            let (t, count) = cell.estimate.counts[k];
            w.write_record([
                mode_name.to_string(),
                fmt_sig(t),
                fmt_sig(cell.epsilon),
                fmt_sig(cell.delta),
                count.to_string(),
                slope_so_far,
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::numerical(e.to_string()))?;

    let summary = EntropySummary {
        version: env!("CARGO_PKG_VERSION"),
        config_hash: stamp.hash.clone(),
        system: label,
        mode: mode_name,
        seed,
        samples: sample.len(),
        t_grid: &t_grid,
        epsilon_grid: &eps_grid,
        delta_grid: &delta_grid,
        cells: table
            .cells
            .iter()
            .map(|c| CellSummary {
                epsilon: c.epsilon,
                delta: c.delta,
                slope: c.estimate.slope,
                intercept: c.estimate.intercept,
                degenerate: c.estimate.degenerate,
                counts: c.estimate.counts.clone(),
            })
            .collect(),
        reported_slope: table.reported_slope,
        stable: table.stable,
        saturated: table.saturated,
        eps_monotone: table.eps_monotone,
    };
    let out_json = output::resolve(params.out_json.as_deref().unwrap_or("entropy.json"));
    output::write_json(&out_json, &summary)?;
    println!(
        "entropy {label} [{mode_name}]: slope {} ({}) -> {}, {}",
        fmt_sig(table.reported_slope),
        if table.stable { "stable" } else { "unstable" },
        out_csv.display(),
        out_json.display()
    );
    Ok(())
}

/// Event-sequence builder for windowed counting, by source name.
#[allow(clippy::type_complexity)]
fn tau_builder(
    spec: &ExampleSpec,
    source: &str,
) -> Result<Option<Box<dyn Fn(&Point, f64) -> Result<TimeSequence> + Sync>>> {
    let source = match source {
        "auto" => match &spec.dynamics {
            Dynamics::Impulsive(_) => "impulse",
            Dynamics::Flow(_) => "section",
        },
        other => other,
    };
    match (source, &spec.dynamics) {
        ("impulse", Dynamics::Impulsive(sys)) => {
            let sys = sys.clone();
            Ok(Some(Box::new(move |x: &Point, t: f64| {
                timefns::impulse_sequence(&sys, x, t)
            })))
        }
        ("merged", Dynamics::Impulsive(sys)) => {
            let sys = sys.clone();
            Ok(Some(Box::new(move |x: &Point, t: f64| {
                let tau = timefns::impulse_sequence(&sys, x, t)?;
                let theta = timefns::visit_sequence(&sys, x, t)?;
                timefns::merge(&tau, &theta)
            })))
        }
        ("section", Dynamics::Flow(flow)) => {
            let section = spec.section.clone().ok_or_else(|| {
                Error::InvalidConfig("this system has no marked cross-section".into())
            })?;
            let flow = flow.clone();
            let gap = spec.section_gap;
            Ok(Some(Box::new(move |x: &Point, t: f64| {
                timefns::section_sequence(&flow, &section, gap, x, t)
            })))
        }
        ("section", Dynamics::Impulsive(_)) | ("impulse" | "merged", Dynamics::Flow(_)) => {
            Err(Error::InvalidConfig(format!(
                "tau source '{source}' does not apply to this system"
            )))
        }
        (other, _) => Err(Error::InvalidConfig(format!(
            "unknown tau source '{other}' (auto, impulse, section, merged)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CheckSummary<'a> {
    version: &'a str,
    config_hash: String,
    system: &'a str,
    seed: u64,
    samples: usize,
    all_pass: bool,
    report: &'a impulsive::impulse::ConditionsReport,
}

fn cmd_check(
    config: &ExperimentConfig,
    spec: &ExampleSpec,
    label: &str,
    stamp: &OutputStamp,
) -> Result<()> {
    let sys = spec
        .dynamics
        .as_impulsive()
        .ok_or_else(|| Error::InvalidConfig(format!("'{label}' has no impulse set to check")))?;
    let samples = config.params.samples.unwrap_or(200);
    let seed = config.params.seed.unwrap_or(7);
    let report = sys.check_conditions(samples, seed)?;
    let summary = CheckSummary {
        version: env!("CARGO_PKG_VERSION"),
        config_hash: stamp.hash.clone(),
        system: label,
        seed,
        samples,
        all_pass: report.all_pass(),
        report: &report,
    };
    let out = output::resolve(config.params.out.as_deref().unwrap_or("check.json"));
    output::write_json(&out, &summary)?;
    println!(
        "check {label}: {} (gap {}, lipschitz {}) -> {}",
        if report.all_pass() {
            "all pass"
        } else {
            "FAILURES"
        },
        fmt_sig(report.separation_gap.measured),
        fmt_sig(report.lipschitz.measured),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// quotient
// ---------------------------------------------------------------------------

fn cmd_quotient(
    config: &ExperimentConfig,
    spec: &ExampleSpec,
    label: &str,
    stamp: &OutputStamp,
) -> Result<()> {
    let sys = spec.dynamics.as_impulsive().ok_or_else(|| {
        Error::InvalidConfig(format!(
            "'{label}' has no impulse set; no quotient to build"
        ))
    })?;
    let pairs = config.params.pairs.unwrap_or(100);
    let pool_size = config.params.pool.unwrap_or(200);
    let max_chain = config.params.max_chain.unwrap_or(3);
    let seed = config.params.seed.unwrap_or(7);

    let quotient = Quotient::new(sys.clone());
    let space = sys.space().clone();
    let sample = spec.seeded(2 * pairs, seed);
    let pool = spec.seeded(pool_size, seed.wrapping_add(1));

    let out = output::resolve(config.params.out.as_deref().unwrap_or("quotient.csv"));
    let mut w = output::csv_writer(&out, stamp, label)?;
    w.write_record(["pair", "d", "d_quotient", "d_chain"])
        .map_err(csv_err)?;
    let mut max_gap: f64 = 0.0;
    for (k, pair) in sample.chunks_exact(2).take(pairs).enumerate() {
        let (x, y) = (&pair[0], &pair[1]);
        let d = space.dist(x, y)?;
        let (px, py) = (quotient.project(x)?, quotient.project(y)?);
        let dq = quotient.dist(&px, &py)?;
        let dc = quotient.chain_dist(&px, &py, max_chain, &pool)?;
        max_gap = max_gap.max((dq - dc).abs());
        w.write_record([k.to_string(), fmt_sig(d), fmt_sig(dq), fmt_sig(dc)])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::numerical(e.to_string()))?;
    println!(
        "quotient {label}: {pairs} pairs, max |collapse - chain| = {} -> {}",
        fmt_sig(max_gap),
        out.display()
    );
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::numerical(format!("csv write: {e}"))
}
