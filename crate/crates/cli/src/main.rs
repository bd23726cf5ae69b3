//! `skqa`: batch driver for the SK QAOA / annealing experiments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure, 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use skqa_core::experiments::{
    emit_outputs, parse_key_values, records_from_csv, render_svg, run_concentration, run_constant_time_sweep,
    run_delta_sweep, run_oracle_check, series_from_records, ExperimentRecord, PlotSpec, SweepConfig,
};
use skqa_core::gmatrix::{infinite_size_energy_for, SolverOptions};
use skqa_core::schedules::{ContinuousSchedule, DiscreteAngles, Discretization};

/// Environment variable holding the worker thread count.
const WORKERS_ENV: &str = "SKQA_WORKERS";

#[derive(Parser)]
#[command(name = "skqa", version, about = "QAOA vs quantum annealing on the SK model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed total time T = Δ·p: QAOA vs annealing error against p.
    SweepConstantTime(SweepArgs),
    /// Residual approximation ratio against p for each Δ.
    SweepDelta(SweepArgs),
    /// Infinite-size energy from the G-matrix fixed point.
    Gmatrix(GmatrixArgs),
    /// Exact, quadrature and Monte-Carlo disorder averages at n = 3.
    OracleCheck(OracleArgs),
    /// Instance-to-instance energy variance against n.
    Concentration(ConcentrationArgs),
    /// Re-plot a results CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// key = value file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated layer counts.
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated qubit counts.
    #[arg(long)]
    n: Option<String>,
    /// Total time for the constant-time sweep.
    #[arg(long = "T")]
    total_time: Option<String>,
    /// Comma-separated Δ values for the delta sweep.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    instances: Option<String>,
    #[arg(long)]
    base_seed: Option<String>,
    /// Annealing refinement tolerance.
    #[arg(long)]
    tol: Option<String>,
    /// `midpoint` or `theory`.
    #[arg(long)]
    discretization: Option<String>,
    /// Schedule file (`sched v1`); default is the optimized p = 17 reference schedule.
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long, default_value = "results.csv")]
    out_csv: PathBuf,
    #[arg(long, default_value = "results.svg")]
    out_svg: PathBuf,
}

#[derive(Args)]
struct AngleArgs {
    /// Angle CSV (`t,gamma,beta`); overrides the schedule options.
    #[arg(long)]
    angles: Option<PathBuf>,
    /// Schedule file (`sched v1`); default is the optimized p = 17 reference schedule.
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    p: usize,
    /// Per-layer step; the schedule is rescaled to total time Δ·p.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// `midpoint` or `theory`.
    #[arg(long, default_value = "midpoint")]
    discretization: String,
}

#[derive(Args)]
struct GmatrixArgs {
    #[command(flatten)]
    angles: AngleArgs,
    #[arg(long, default_value_t = SolverOptions::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = SolverOptions::default().damping)]
    damping: f64,
    #[arg(long, default_value_t = SolverOptions::default().max_iter)]
    max_iter: usize,
    /// Optional CSV of the solved G matrix.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Angle points `gamma:beta`, comma-separated.
    #[arg(long, default_value = "0.2:0.3,0.5:0.1,-0.4:0.7,0.9:-0.2,0.35:0.35")]
    points: String,
    /// Gauss-Hermite nodes per coupling.
    #[arg(long, default_value_t = 64)]
    nodes: usize,
    /// Monte-Carlo instance count.
    #[arg(long, default_value_t = 10_000)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    base_seed: u64,
    #[arg(long, default_value = "oracle.csv")]
    out_csv: PathBuf,
}

#[derive(Args)]
struct ConcentrationArgs {
    #[command(flatten)]
    angles: AngleArgs,
    /// Comma-separated qubit counts.
    #[arg(long, default_value = "6,8,10,12")]
    n: String,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    base_seed: u64,
    #[arg(long, default_value = "concentration.csv")]
    out_csv: PathBuf,
    #[arg(long, default_value = "concentration.svg")]
    out_svg: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Results CSV to read.
    input: PathBuf,
    #[arg(long, default_value = "abs_error")]
    metric: String,
    /// Linear axes instead of log-log.
    #[arg(long)]
    linear: bool,
    #[arg(long, default_value = "plot.svg")]
    out: PathBuf,
}

/// Marks errors in user-supplied configuration.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<skqa_core::Error>() {
        Some(e) if e.is_numerical() => 3,
        Some(_) => 2,
        None => 1,
    }
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))
}

fn parse_rule(s: &str) -> anyhow::Result<Discretization> {
    match s {
        "midpoint" => Ok(Discretization::Midpoint),
        "theory" => Ok(Discretization::Theory),
        _ => Err(config_err(format!("unknown discretization '{s}'"))),
    }
}

fn load_schedule(path: &Path) -> anyhow::Result<ContinuousSchedule> {
    let text = read_input(path)?;
    Ok(ContinuousSchedule::from_text(&text).with_context(|| format!("in {}", path.display()))?)
}

fn sweep_config(args: &SweepArgs) -> anyhow::Result<SweepConfig> {
    let mut map = match &args.config {
        Some(path) => parse_key_values(&read_input(path)?).with_context(|| format!("in {}", path.display()))?,
        None => Default::default(),
    };
    let schedule_path = map.remove("schedule").map(PathBuf::from);
    let mut cfg = SweepConfig::default();
    for (k, v) in &map {
        cfg.set(k, v)?;
    }
    let overrides = [
        ("p", &args.p),
        ("n", &args.n),
        ("T", &args.total_time),
        ("delta", &args.delta),
        ("instances", &args.instances),
        ("base_seed", &args.base_seed),
        ("tol", &args.tol),
        ("discretization", &args.discretization),
    ];
    for (k, v) in overrides {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    if let Some(path) = args.schedule.clone().or(schedule_path) {
        cfg.schedule = load_schedule(&path)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_angles(args: &AngleArgs) -> anyhow::Result<DiscreteAngles> {
    if let Some(path) = &args.angles {
        let text = read_input(path)?;
        return Ok(DiscreteAngles::from_csv(&text).with_context(|| format!("in {}", path.display()))?);
    }
    if args.p == 0 || !args.delta.is_finite() {
        bail!(config_err("p must be positive and delta finite"));
    }
    let rule = parse_rule(&args.discretization)?;
    let t = args.delta * args.p as f64;
    let schedule = match &args.schedule {
        Some(path) => load_schedule(path)?.with_scale(t),
        None => ContinuousSchedule::reference(args.delta, args.p),
    };
    Ok(schedule.discretize(rule, args.p)?)
}

fn parse_points(s: &str) -> anyhow::Result<Vec<(f64, f64)>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (g, b) = t
                .split_once(':')
                .ok_or_else(|| config_err(format!("expected gamma:beta, got '{t}'")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| config_err(format!("bad number in '{t}'")))
            };
            Ok((parse(g)?, parse(b)?))
        })
        .collect()
}

fn parse_list(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| config_err(format!("bad integer '{t}'"))))
        .collect()
}

fn write_records(records: &[ExperimentRecord], csv: &Path, svg: &Path, spec: &PlotSpec) -> anyhow::Result<()> {
    emit_outputs(records, csv, svg, spec).with_context(|| format!("writing {} / {}", csv.display(), svg.display()))?;
    eprintln!(
        "wrote {} records to {} and {}",
        records.len(),
        csv.display(),
        svg.display()
    );
    Ok(())
}

fn setup_workers() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| config_err(format!("{WORKERS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    setup_workers()?;
    match cli.command {
        Command::SweepConstantTime(args) => {
            let cfg = sweep_config(&args)?;
            let records = run_constant_time_sweep(&cfg)?;
            for r in records.iter().filter(|r| r.experiment == "constant_time_fit") {
                println!("n={} {}={:.4}", r.n, r.metric, r.value);
            }
            write_records(&records, &args.out_csv, &args.out_svg, &PlotSpec::decay("abs_error"))
        }
        Command::SweepDelta(args) => {
            let cfg = sweep_config(&args)?;
            let records = run_delta_sweep(&cfg)?;
            write_records(&records, &args.out_csv, &args.out_svg, &PlotSpec::linear("residual_ar"))
        }
        Command::Gmatrix(args) => {
            let angles = resolve_angles(&args.angles)?;
            let opts = SolverOptions {
                tol: args.tol,
                damping: args.damping,
                max_iter: args.max_iter,
            };
            let (nu, sol) = infinite_size_energy_for(&angles, &opts)?;
            println!(
                "p={} nu_inf={nu:.12} iterations={} residual={:.3e}",
                angles.p(),
                sol.iterations,
                sol.residual
            );
            if let Some(out) = &args.out {
                std::fs::write(out, sol.g.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            }
            Ok(())
        }
        Command::OracleCheck(args) => {
            let points = parse_points(&args.points)?;
            let records = run_oracle_check(&points, args.nodes, args.instances, args.base_seed)?;
            for r in &records {
                println!("{} {}={:.10} stderr={:.2e}", r.experiment, r.metric, r.value, r.stderr);
            }
            std::fs::write(&args.out_csv, skqa_core::experiments::records_to_csv(&records))
                .with_context(|| format!("writing {}", args.out_csv.display()))?;
            Ok(())
        }
        Command::Concentration(args) => {
            let angles = resolve_angles(&args.angles)?;
            let ns = parse_list(&args.n)?;
            let records = run_concentration(&ns, &angles, args.angles.delta, args.instances, args.base_seed)?;
            write_records(&records, &args.out_csv, &args.out_svg, &PlotSpec::linear("variance"))
        }
        Command::Plot(args) => {
            let records = records_from_csv(&read_input(&args.input)?)?;
            let spec = if args.linear {
                PlotSpec::linear(&args.metric)
            } else {
                PlotSpec::decay(&args.metric)
            };
            let svg = render_svg(&spec, &series_from_records(&records, &spec.metric));
            std::fs::write(&args.out, svg).with_context(|| format!("writing {}", args.out.display()))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
