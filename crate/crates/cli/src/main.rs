use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gzgw_cli::commands::{cmd_demo_n2, cmd_map, cmd_pattern, cmd_verify, emit, format_demo, MapMode};
use gzgw_cli::error::EXIT_FAILED;
use gzgw_cli::{CliError, CliResult, RunConfig};
use gzgw_core::pattern::STRICTNESS_TOL;

/// Gelfand-Zeitlin patterns and the Ginzburg-Weinstein map.
#[derive(Parser)]
#[command(name = "gzgw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the GZ pattern of a matrix file with its classification.
    Pattern {
        file: PathBuf,
        /// Logarithmic pattern of a positive definite matrix.
        #[arg(long)]
        log: bool,
        /// Relative Hermiticity tolerance for the input.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Interlacing gap below which the pattern counts as boundary.
        #[arg(long, default_value_t = STRICTNESS_TOL)]
        margin: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply γ, γ⁻¹ (--inverse) or extract ψ (--psi).
    Map {
        file: PathBuf,
        #[arg(long, conflicts_with = "psi")]
        inverse: bool,
        #[arg(long)]
        psi: bool,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = STRICTNESS_TOL)]
        margin: f64,
        /// Continuation steps for ψ.
        #[arg(long, default_value_t = gzgw_core::gw::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded verification suite and print a JSON report.
    Verify {
        /// Largest matrix size.
        #[arg(long, default_value_t = RunConfig::default().size)]
        size: usize,
        #[arg(long, default_value_t = RunConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = RunConfig::default().samples)]
        samples: usize,
        #[arg(long, default_value_t = RunConfig::default().tol)]
        tol: f64,
        /// Smallest interlacing margin of sampled matrices.
        #[arg(long, default_value_t = RunConfig::default().margin)]
        margin: f64,
        #[arg(long, default_value_t = RunConfig::default().fd_step)]
        fd_step: f64,
        #[arg(long, default_value_t = RunConfig::default().steps)]
        steps: usize,
        /// JSON file overriding any of the above and individual tolerances.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the 2×2 closed form with the transported γ on a grid.
    DemoN2 {
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long, default_value_t = 2.0)]
        range: f64,
    },
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Pattern { file, log, tol, margin, out } => {
            let p = cmd_pattern(&file, tol, margin, log)?;
            emit(&serde_json::to_string(&p).expect("pattern serialization"), out.as_deref())?;
        }
        Command::Map { file, inverse, psi, tol, margin, steps, out } => {
            let mode = match (inverse, psi) {
                (true, _) => MapMode::Inverse,
                (_, true) => MapMode::Twist,
                _ => MapMode::Forward,
            };
            emit(&cmd_map(&file, mode, tol, margin, steps)?, out.as_deref())?;
        }
        Command::Verify { size, seed, samples, tol, margin, fd_step, steps, config, out } => {
            let mut cfg = RunConfig { size, seed, samples, tol, margin, fd_step, steps, ..RunConfig::default() };
            if let Some(path) = config {
                cfg = cfg.with_file(&path)?;
            }
            let report = cmd_verify(&cfg)?;
            emit(&report.to_json(), out.as_deref())?;
            if !report.pass {
                let failures: Vec<_> = report.failures().collect();
                for f in &failures {
                    eprintln!("FAIL {}", serde_json::to_string(f).expect("record serialization"));
                }
                let first = failures[0];
                let err = CliError::VerifyFailed {
                    count: failures.len(),
                    first: format!("{} (n = {})", first.name, first.n),
                };
                eprintln!("error: {err}");
                return Ok(ExitCode::from(EXIT_FAILED as u8));
            }
        }
        Command::DemoN2 { points, range } => {
            println!("{}", format_demo(&cmd_demo_n2(points, range)?));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
