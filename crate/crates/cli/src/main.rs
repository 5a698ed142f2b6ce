//! Experiment CLI: run scenarios, spot-check the descent lemma, and dump
//! brute-force Pareto fronts.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use omopg_core::{
    emit_report, grid_pareto_front, parse_scenario_with_overrides, render_summary, run_experiment,
    run_lemma1_suite, ExperimentOptions, NonsmoothSpec, ScenarioSpec, DEFAULT_ORACLE_TOL,
};

#[derive(Parser)]
#[command(
    name = "omopg",
    version,
    about = "Online multi-objective proximal gradient experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario end to end and emit trace.csv + summary.txt.
    Run(RunArgs),
    /// Randomized verification of the descent lemma on builtin composites.
    CheckLemma1 {
        /// Number of random (objective, x, y, c) samples.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Brute-force Pareto front of a scenario's objectives at one time step.
    Pareto {
        /// Scenario file.
        scenario: PathBuf,
        /// Time step to evaluate (1-based).
        #[arg(long = "t")]
        t: usize,
        /// Grid resolution per axis (2..=401).
        #[arg(long = "grid", default_value_t = 401)]
        grid: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file.
    scenario: PathBuf,
    /// Output directory for trace.csv and summary.txt.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Record inner iterates (enables the inner-iterate lemma verdict).
    #[arg(long)]
    record_inner: bool,
    /// Oracle residual tolerance.
    #[arg(long, default_value_t = DEFAULT_ORACLE_TOL)]
    tol: f64,
    /// Scenario overrides, e.g. `--override K=20` (repeatable).
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn split_overrides(raw: &[String]) -> Result<Vec<(String, String)>> {
    raw.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .with_context(|| format!("override `{s}` is not of the form key=value"))
        })
        .collect()
}

fn load_scenario(path: &PathBuf, overrides: &[String]) -> Result<ScenarioSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read scenario file {}", path.display()))?;
    let overrides = split_overrides(overrides)?;
    parse_scenario_with_overrides(&text, &overrides)
        .with_context(|| format!("invalid scenario {}", path.display()))
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let spec = load_scenario(&args.scenario, &args.overrides)?;
    let options = ExperimentOptions {
        record_inner: args.record_inner,
        oracle_tol: args.tol,
    };
    let experiment = run_experiment(&spec, &options).context("experiment failed")?;
    let (trace_path, summary_path) = emit_report(&experiment.report, &args.out)?;
    print!("{}", render_summary(&experiment.report));
    for (i, (dynamic, stat)) in experiment
        .report
        .dynamic_regret
        .iter()
        .zip(&experiment.report.static_regret)
        .enumerate()
    {
        println!("regret.{} dynamic={dynamic} static={stat}", i + 1);
    }
    println!("wrote {}", trace_path.display());
    println!("wrote {}", summary_path.display());
    Ok(())
}

fn cmd_check_lemma1(samples: usize, seed: u64) -> Result<()> {
    let suite = run_lemma1_suite(samples, seed);
    println!(
        "samples={} satisfied={} descent_ok={} min_slack={} max_descent_gap={}",
        suite.samples, suite.satisfied, suite.descent_ok, suite.min_slack, suite.max_descent_gap
    );
    if !suite.all_passed() {
        bail!(
            "descent lemma violated on {} of {} samples",
            suite.samples - suite.satisfied.min(suite.descent_ok),
            suite.samples
        );
    }
    Ok(())
}

/// Grid box for the front: the common box domain when every objective is
/// box-constrained with identical bounds, else `[-10, 10]^n`.
fn pareto_box(spec: &ScenarioSpec) -> (f64, f64) {
    let mut bounds: Option<(f64, f64)> = None;
    for obj in &spec.objectives {
        match obj.g {
            NonsmoothSpec::Box { lo, hi } => match bounds {
                None => bounds = Some((lo, hi)),
                Some(b) if b == (lo, hi) => {}
                _ => return (-10.0, 10.0),
            },
            _ => return (-10.0, 10.0),
        }
    }
    bounds.unwrap_or((-10.0, 10.0))
}

fn cmd_pareto(scenario: &PathBuf, t: usize, grid: usize) -> Result<()> {
    let spec = load_scenario(scenario, &[])?;
    if t < 1 || t > spec.horizon {
        bail!("time step {t} outside 1..={}", spec.horizon);
    }
    let stream = spec.build_stream()?;
    let (lo, hi) = pareto_box(&spec);
    let lo_v = omopg_core::nalgebra::DVector::from_element(spec.dim, lo);
    let hi_v = omopg_core::nalgebra::DVector::from_element(spec.dim, hi);
    let front = grid_pareto_front(stream.at(t), &lo_v, &hi_v, grid)?;
    let coords: Vec<String> = (1..=spec.dim).map(|j| format!("x{j}")).collect();
    let vals: Vec<String> = (1..=spec.num_objectives)
        .map(|i| format!("phi_{i}"))
        .collect();
    println!("{},{}", coords.join(","), vals.join(","));
    for fp in front {
        let xs: Vec<String> = fp.point.iter().map(|v| format!("{v}")).collect();
        let vs: Vec<String> = fp.values.iter().map(|v| format!("{v}")).collect();
        println!("{},{}", xs.join(","), vs.join(","));
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::CheckLemma1 { samples, seed } => cmd_check_lemma1(*samples, *seed),
        Command::Pareto { scenario, t, grid } => cmd_pareto(scenario, *t, *grid),
    }
}
