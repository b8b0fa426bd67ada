use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use levy_she::cli::{self, CliError, ExperimentKind};

#[derive(Parser)]
#[command(name = "levy-she", about = "Stochastic heat equation experiment runner", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Parser)]
struct RunArgs {
    /// Experiment config (TOML)
    config: PathBuf,
    /// Master seed for all replica streams
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output directory for artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic exponent and front-rate bounds over a parameter sweep
    Bounds(RunArgs),
    /// Monte Carlo field simulation with snapshot statistics
    Simulate(RunArgs),
    /// Moment estimates with bootstrap error bars and growth-rate fits
    Moments(RunArgs),
    /// Tail-index estimation with a stability ladder
    Tails(RunArgs),
    /// Spatial growth-cone scan
    Front(RunArgs),
    /// Inequality test bench with empirical constants
    Lab(RunArgs),
    /// Small-parameter rate fits against analytic targets
    Asymptotics(RunArgs),
    /// Compare two artifact directories cell by cell
    Compare {
        dir_a: PathBuf,
        dir_b: PathBuf,
    },
}

fn dispatch(kind: ExperimentKind, a: RunArgs) -> Result<(), CliError> {
    let threads = if a.threads == 0 { num_threads_default() } else { a.threads };
    let artifacts = cli::run(kind, &a.config, a.seed, threads, &a.out)?;
    println!(
        "{} run complete: config {} -> {}",
        kind.name(),
        artifacts.config_hash,
        artifacts.out_dir.display()
    );
    for (check, ok) in &artifacts.checks {
        println!("  {check}: {}", if *ok { "pass" } else { "FAIL" });
    }
    Ok(())
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Bounds(a) => dispatch(ExperimentKind::Bounds, a),
        Command::Simulate(a) => dispatch(ExperimentKind::Simulate, a),
        Command::Moments(a) => dispatch(ExperimentKind::Moments, a),
        Command::Tails(a) => dispatch(ExperimentKind::Tails, a),
        Command::Front(a) => dispatch(ExperimentKind::Front, a),
        Command::Lab(a) => dispatch(ExperimentKind::Lab, a),
        Command::Asymptotics(a) => dispatch(ExperimentKind::Asymptotics, a),
        Command::Compare { dir_a, dir_b } => cli::compare(&dir_a, &dir_b).map(|report| {
            println!("verdict: {:?}", report.verdict);
            for diff in &report.parameter_diffs {
                println!("  param {diff}");
            }
            if report.differing_cells > 0 && report.differing_cells != usize::MAX {
                println!(
                    "  cells: {} differing, {} within confidence bands",
                    report.differing_cells, report.equivalent_cells
                );
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
