// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use arcpd::commands;
use arcpd::config::Config;
use arcpd::error::CliError;

#[derive(Parser)]
#[command(
    name = "arcpd",
    version,
    about = "Change-point detection experiments on AR(1) data: CUSUM and Shiryaev-Roberts \
             operating characteristics, KL detectability, threshold calibration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (`key = value` lines, `#` comments).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path; overrides the config's `output_path`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (falls back to ARCPD_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Master seed; overrides the config's `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Reduced replication counts for quick smoke runs.
    #[arg(long, global = true)]
    smoke: bool,
}

#[derive(Subcommand)]
enum Command {
    /// KL detectability report, optionally swept over the post-change correlation.
    Kl,
    /// Simulate one observation path.
    Simulate,
    /// Estimate the ARL to false alarm at a fixed threshold.
    Arl,
    /// Estimate the worst-case detection delay (change-point zero).
    Sadd,
    /// Estimate conditional detection delays at chosen change-points.
    Addk,
    /// Calibrate the threshold for a target ARL.
    Calibrate,
    /// Reproduce a bundled reference table at the configured budget.
    Table,
    /// Worst-case delay versus log ARL with the first-order overlay.
    Curves,
    /// Validate the transition kernel against simulation.
    KernelCheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code_name());
            ExitCode::from(e.exit_code().clamp(0, 255) as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("ARCPD_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    }

    let config_path = cli
        .config
        .ok_or_else(|| CliError::Validation("missing required --config <path>".into()))?;
    let text = std::fs::read_to_string(&config_path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", config_path.display())))?;
    let mut cfg = Config::parse(&text)?;
    cfg.seed_override = cli.seed;
    cfg.output_override = cli.output.map(|p| p.display().to_string());
    cfg.smoke = cli.smoke;

    let out = match cli.command {
        Command::Kl => commands::cmd_kl(&cfg)?,
        Command::Simulate => commands::cmd_simulate(&cfg)?,
        Command::Arl => commands::cmd_arl(&cfg)?,
        Command::Sadd => commands::cmd_sadd(&cfg)?,
        Command::Addk => commands::cmd_addk(&cfg)?,
        Command::Calibrate => commands::cmd_calibrate(&cfg)?,
        Command::Table => commands::cmd_table(&cfg)?,
        Command::Curves => commands::cmd_curves(&cfg)?,
        Command::KernelCheck => commands::cmd_kernel_check(&cfg)?,
    };

    print!("{}", out.summary);
    if let Some(csv) = &out.csv {
        match cfg.output_path() {
            Some(path) => {
                std::fs::write(&path, csv)
                    .map_err(|e| CliError::Io(format!("writing {path}: {e}")))?;
                println!("wrote {path}");
            }
            None => print!("{csv}"),
        }
    }
    if out.check_failures > 0 {
        return Err(CliError::CheckFailed(format!(
            "{} grid cell(s) disagreed with the transition kernel",
            out.check_failures
        )));
    }
    Ok(())
}
