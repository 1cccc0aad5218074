//! `hotspots` scenario runner.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 for
//! configuration errors and 3 for numerical failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use hotspots::experiments::{emit_report, run_scenario, ScenarioConfig, ScenarioKind, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "hotspots", version, about = "Hot-spots numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corner angles, symmetrization convexity, inversion identities.
    CheckGeometry(RunArgs),
    /// Build and audit conformal maps.
    BuildMap(RunArgs),
    /// Scaling-coupling ordering checks.
    Couple(RunArgs),
    /// Tail monotonicity in the starting radius.
    Tail(RunArgs),
    /// Survival probabilities in a domain.
    Survival(RunArgs),
    /// Mixed ground state on a mesh.
    Eig(RunArgs),
    /// Hot-spot location and monotonicity along curve families.
    VerifyHotspots(RunArgs),
    /// Eigen-expansion against Monte Carlo survival.
    Crosscheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overridden by HOTSPOTS_OUT_DIR).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for path batches.
    #[arg(long)]
    threads: Option<usize>,
}

impl Command {
    fn split(&self) -> (ScenarioKind, &RunArgs) {
        match self {
            Self::CheckGeometry(a) => (ScenarioKind::GeometryCheck, a),
            Self::BuildMap(a) => (ScenarioKind::MapBuild, a),
            Self::Couple(a) => (ScenarioKind::CouplingRun, a),
            Self::Tail(a) => (ScenarioKind::TailMonotone, a),
            Self::Survival(a) => (ScenarioKind::SurvivalField, a),
            Self::Eig(a) => (ScenarioKind::EigSolve, a),
            Self::VerifyHotspots(a) => (ScenarioKind::HotspotVerify, a),
            Self::Crosscheck(a) => (ScenarioKind::Crosscheck, a),
        }
    }
}

enum Failure {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
}

fn load(kind: ScenarioKind, args: &RunArgs) -> anyhow::Result<ScenarioConfig> {
    let config = ScenarioConfig::load(&args.config)?;
    if config.kind != kind {
        bail!(
            "{} holds a {:?} scenario; run it with `hotspots {}`",
            args.config.display(),
            config.kind,
            config.kind.subcommand()
        );
    }
    if args.threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    Ok(config)
}

fn out_dir(args: &RunArgs) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map_or_else(|| args.out.clone(), PathBuf::from)
}

fn execute(kind: ScenarioKind, args: &RunArgs) -> Result<bool, Failure> {
    let config = load(kind, args).map_err(Failure::Config)?;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")
            .map_err(Failure::Numerical)?;
    }
    let base = out_dir(args);
    let record = run_scenario(&config, &base).map_err(|e| {
        let config_side = e.is_config();
        let e = anyhow::Error::new(e).context(format!("scenario {}", config.scenario_id));
        if config_side {
            Failure::Config(e)
        } else {
            Failure::Numerical(e)
        }
    })?;
    let dir = config.output_dir(&base);
    let report = emit_report(std::slice::from_ref(&record), &dir)
        .with_context(|| format!("writing the report into {}", dir.display()))
        .map_err(Failure::Numerical)?;
    print_summary(&dir, &record);
    Ok(report.passed)
}

fn print_summary(dir: &Path, record: &hotspots::experiments::ResultRecord) {
    for check in &record.checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {} ({})", check.name, check.invariant);
    }
    println!(
        "{} {}: {} checks, outputs in {}",
        if record.passed() { "PASS" } else { "FAIL" },
        record.scenario_id,
        record.checks.len(),
        dir.display()
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
