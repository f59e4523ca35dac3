//! `circle-nbody`: simulate, cross-check and verify N-body models on the
//! unit circle.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors (and
//! failed verification checks), 2 when the dynamics hit a singularity.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use circle_nbody::suites::{run_suite, Suite, DEFAULT_SEED};

use run::Failure;

#[derive(Debug, Parser)]
#[command(name = "circle-nbody", version, about = "Integrable and solvable N-body models on the unit circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a configuration; write trajectory, invariants and summary files.
    Simulate {
        /// Run configuration (TOML).
        config: PathBuf,
        /// Also write an SVG plot of the trajectory.
        #[arg(long)]
        svg: bool,
    },
    /// Run a randomized verification suite and report every check.
    Verify {
        /// One of: interp, identities, equivalence, invariants, isochrony, algebraic.
        suite: String,
        /// Seed for the random draws.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Solve a configuration by every available method and tabulate the deviations.
    Compare {
        /// Run configuration (TOML).
        config: PathBuf,
        /// Also write an SVG plot of the angle-form trajectory.
        #[arg(long)]
        svg: bool,
    },
}

fn verify(name: &str, seed: u64) -> Result<(), Failure> {
    let suite = Suite::from_name(name).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        Failure::Usage(format!("unknown suite {name:?} (expected one of {})", names.join(", ")))
    })?;
    let report = run_suite(suite, seed)?;
    for check in &report.checks {
        println!("{check}");
    }
    let failed = report.checks.iter().filter(|c| !c.passed()).count();
    println!("{}: {} of {} checks passed", suite.name(), report.checks.len() - failed, report.checks.len());
    match report.first_failure() {
        None => Ok(()),
        Some(check) => Err(Failure::Usage(format!("check failed: {}", check.name))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Simulate { config, svg } => run::simulate(config, *svg),
        Command::Verify { suite, seed } => verify(suite, *seed),
        Command::Compare { config, svg } => run::compare(config, *svg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
