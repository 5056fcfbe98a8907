//! Batch driver for the summation-identity library: identity suites,
//! coefficient/kernel tabulation, and two-sided verification runs, all
//! reported as fixed-precision CSV plus one summary line per check.
//!
//! Exit status: 0 when every checked row meets its tolerance, 1 on a
//! tolerance breach, 2 on configuration or computation errors.

mod cmd_coeffs;
mod cmd_gamma;
mod cmd_kernel;
mod cmd_lfe;
mod cmd_sums;
mod cmd_voronoi;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "voronoi3", version, about = "Summation-identity verification driver")]
struct Cli {
    /// JSON run configuration (required by coeffs, kernel-tab,
    /// voronoi-verify, lfe-verify).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for CSV and script outputs.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Pass/fail threshold; overrides the config and built-in defaults.
    #[arg(long, global = true, value_name = "FLOAT")]
    tolerance: Option<f64>,

    /// Worker threads for the dual-side sums.
    #[arg(long, global = true, value_name = "INT", default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the gamma-factor identities on a complex grid.
    GammaCheck {
        /// Negate one route of the named identity (test hook).
        #[arg(long, hide = true, value_name = "NAME")]
        inject_sign_bug: Option<String>,
    },
    /// Check Kloosterman, Ramanujan, and Gauss-sum identities.
    SumsCheck,
    /// Write the configured form's coefficients as CSV.
    Coeffs,
    /// Tabulate the dual-side kernel on a logarithmic grid.
    KernelTab,
    /// Compare both sides of the summation identity per configured twist.
    VoronoiVerify,
    /// Check the twisted functional equation of the configured form.
    LfeVerify,
}

fn require_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("this subcommand needs --config <path>"))?;
    RunConfig::load(path)
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.threads == 0 {
        bail!("--threads must be at least 1");
    }
    if let Some(tol) = cli.tolerance {
        if !(tol.is_finite() && tol > 0.0) {
            bail!("--tolerance must be positive and finite");
        }
    }
    match &cli.command {
        Command::GammaCheck { inject_sign_bug } => {
            cmd_gamma::run(cli.tolerance, inject_sign_bug.as_deref())
        }
        Command::SumsCheck => cmd_sums::run(cli.tolerance),
        Command::Coeffs => cmd_coeffs::run(&require_config(cli)?, &cli.out),
        Command::KernelTab => cmd_kernel::run(&require_config(cli)?, &cli.out),
        Command::VoronoiVerify => {
            cmd_voronoi::run(&require_config(cli)?, &cli.out, cli.tolerance, cli.threads)
        }
        Command::LfeVerify => cmd_lfe::run(&require_config(cli)?, &cli.out, cli.tolerance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
