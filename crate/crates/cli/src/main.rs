//! Benchmark CLI: run experiments, sweep grids, check schedules, and drive
//! the verification suite.
//!
//! Exit codes: 0 success, 1 internal failure, 2 config error, 3 divergence
//! (partial artifacts are left in the output directory), 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sumopt_core::error::Error;
use sumopt_core::harness::{execute_run, execute_sweep, RunConfig};
use sumopt_core::schedules::{check_a6, Schedule};
use sumopt_core::verify;

#[derive(Parser)]
#[command(name = "sumopt", about = "Stochastic momentum optimization benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the runs described by a config file.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
        /// Refuse schedules that fail the admissibility check.
        #[arg(long)]
        require_a6: bool,
    },
    /// Execute the grid described by the config's [sweep] section.
    Sweep {
        /// Path to the experiment config (must contain [sweep]).
        config: PathBuf,
        /// Refuse schedules that fail the admissibility check.
        #[arg(long)]
        require_a6: bool,
    },
    /// Classify a schedule string for a given Hölder exponent.
    CheckSchedule {
        /// Schedule text, e.g. power_decay:c=0.5,r=1.0
        schedule: String,
        /// Hölder exponent of the target objective, in (0, 1].
        #[arg(long)]
        alpha: f64,
        /// Horizon for numeric probes of explicit lists.
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
    },
    /// Run the verification suite and print one line per criterion.
    Verify {
        /// Run a single criterion by name.
        #[arg(long)]
        only: Option<String>,
        /// Base seed of the suite.
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        /// Scratch directory for artifact-determinism checks.
        #[arg(long)]
        scratch: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter { .. }
        | Error::Degenerate(_)
        | Error::ScheduleExhausted { .. }
        | Error::AdaptiveSchedule => 2,
        Error::Divergence { .. } | Error::NonFinite { .. } => 3,
        Error::Io { .. } => 4,
        _ => 1,
    }
}

fn run_command(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Run { config, require_a6 } => {
            let mut cfg = RunConfig::parse_file(&config)?;
            cfg.require_a6 |= require_a6;
            let report = execute_run(&cfg)?;
            let wall: f64 = report.summaries.iter().map(|s| s.wall_time_s).sum();
            println!(
                "{} runs done in {:.2}s (mean final f {}, mean final ||grad|| {})",
                report.summaries.len(),
                wall,
                report.mean.final_f,
                report.mean.final_grad_norm
            );
            for path in &report.artifact_paths {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, require_a6 } => {
            let mut cfg = RunConfig::parse_file(&config)?;
            cfg.require_a6 |= require_a6;
            let rows = execute_sweep(&cfg)?;
            println!("{} sweep cells done", rows.len());
            for row in &rows {
                println!(
                    "cell {}: T={} beta={} s={} {} mean||grad(x_R)||^2={}",
                    row.cell, row.iterations, row.beta, row.s, row.schedule, row.mean.grad_sq_at_rt
                );
            }
            println!("wrote {}", cfg.out_dir.join("sweep_summary.csv").display());
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckSchedule {
            schedule,
            alpha,
            horizon,
        } => {
            let sched = Schedule::parse(&schedule)?;
            let verdict = check_a6(&sched, alpha, horizon)?;
            println!("{verdict}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { only, seed, scratch } => {
            let scratch = scratch.unwrap_or_else(|| {
                std::env::temp_dir().join(format!("sumopt-verify-{}", std::process::id()))
            });
            let reports = verify::run_suite(only.as_deref(), seed, &scratch)?;
            let mut all_pass = true;
            for report in &reports {
                println!("{}", report.line());
                all_pass &= report.pass;
            }
            if all_pass {
                println!("verify: all {} criteria passed", reports.len());
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("verify: criteria failed");
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
