//! `sofar`: scenario-driven acoustic shadow-zone and reflector-placement
//! pipelines with plot-ready CSV/JSON output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sofar_cli::commands;
use sofar_cli::scenario::load_scenario;
use sofar_cli::CliError;

#[derive(Parser)]
#[command(
    name = "sofar",
    version,
    about = "Underwater sound propagation, shadow zones, and reflector placement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file path, or the name of a bundled preset.
    #[arg(long, global = true)]
    scenario: Option<String>,

    /// Directory for output files (created if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the scenario's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; defaults to SOFAR_THREADS or all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the source fan and export ray polylines.
    Trace,
    /// Accumulate transmission-loss grids and coverage curves.
    Field,
    /// Shadow-zone accounting for the scenario's window.
    Shadow,
    /// Mooring-depth optimization or axis-advantage sweep.
    Optimize,
    /// Pose-correction experiment over seeded trials.
    Dynamics,
    /// One JSON aggregating every pipeline's plot-ready values.
    Report,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::Field => "field",
            Command::Shadow => "shadow",
            Command::Optimize => "optimize",
            Command::Dynamics => "dynamics",
            Command::Report => "report",
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("SOFAR_THREADS") {
        Ok(s) => s
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("SOFAR_THREADS: {s:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let scenario_arg = cli
        .scenario
        .ok_or_else(|| CliError::Config("--scenario is required".into()))?;
    let out = cli
        .out
        .ok_or_else(|| CliError::Config("--out is required".into()))?;
    let sc = load_scenario(&scenario_arg)?;
    let seed = cli.seed.unwrap_or(sc.seed);
    let threads = match cli.threads {
        Some(n) => Some(n),
        None => threads_from_env()?,
    };
    // One pool owns all parallelism; worker modules only split work that
    // is handed to them inside it.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| commands::run(cli.command.name(), &sc, &out, seed))?;
    println!(
        "{} on scenario {} -> {}",
        cli.command.name(),
        sc.name,
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
