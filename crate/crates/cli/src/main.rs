//! `roict` — phantom generation, projection, reconstruction, ROI QUBO
//! refinement, full pipelines and pipeline comparisons.
//!
//! All parameters come from a flat key=value config file (`--config`);
//! every key has a default, so subcommands run without one. Exit codes:
//! 0 success, 2 configuration error, 3 runtime or capacity error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliError;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "roict", about = "Hybrid ROI CT reconstruction experiments")]
struct Cli {
    /// Flat key=value configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the seeded phantom and write ground_truth.csv.
    Phantom {
        /// Also write an ASCII PGM rendering.
        #[arg(long)]
        pgm: bool,
    },
    /// Generate the phantom and its measured sinogram.
    Project,
    /// Coarse reconstruction only (fbp, sart or first-stage qtr).
    Recon,
    /// Solve a .qubo.txt problem file with the configured solver.
    Refine { problem: PathBuf },
    /// Run the full hybrid pipeline and write all artifacts.
    Pipeline,
    /// Run reconstruction variants on a shared phantom and tabulate ROI
    /// metrics.
    Compare {
        /// Comma-separated subset of: direct_fbp, direct_sart, qtr_qtr,
        /// fbp_qtr, sart_qtr (default: all five).
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<String>>,
    },
    /// RMSE/MAE between two image CSV files over the configured ROI.
    Metrics { truth: PathBuf, recon: PathBuf },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref()).map_err(CliError::Config)?;
    match cli.command {
        Command::Phantom { pgm } => commands::phantom(&cfg, pgm),
        Command::Project => commands::project(&cfg),
        Command::Recon => commands::recon(&cfg),
        Command::Refine { problem } => commands::refine(&cfg, &problem),
        Command::Pipeline => commands::pipeline(&cfg),
        Command::Compare { variants } => {
            let default: Vec<String> = commands::COMPARE_VARIANTS
                .iter()
                .map(|s| s.to_string())
                .collect();
            commands::compare(&cfg, &variants.unwrap_or(default))
        }
        Command::Metrics { truth, recon } => commands::metrics(&cfg, &truth, &recon),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
