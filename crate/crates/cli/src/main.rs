use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use elsim_cli::commands::{cmd_certify_ledger, cmd_check_coefficients, cmd_run, cmd_verify_identities};
use elsim_cli::{load_config, CliError, CliResult, RunConfig};

/// Ericksen-Leslie liquid-crystal flow solver.
#[derive(Debug, Parser)]
#[command(name = "elsim", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed of the random identity-suite states; recorded in run verdicts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory, overriding `output.directory`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Suppress progress and report output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a simulation and write its ledger, snapshots and verdict.
    Run,
    /// Print derived coefficients and the admissibility verdict.
    CheckCoefficients,
    /// Run the oracle suites on seeded random states.
    VerifyIdentities,
    /// Recompute the energy-law residual and sign checks of a ledger CSV.
    CertifyLedger {
        #[arg(value_name = "LEDGER")]
        ledger: PathBuf,
    },
}

fn config(cli: &Cli) -> CliResult<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Validation("this command needs --config PATH".into()))?;
    load_config(path)
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Run => cmd_run(&config(cli)?, cli.out.clone(), cli.seed, cli.quiet),
        Command::CheckCoefficients => cmd_check_coefficients(&config(cli)?, cli.quiet),
        Command::VerifyIdentities => cmd_verify_identities(cli.seed, cli.quiet),
        Command::CertifyLedger { ledger } => cmd_certify_ledger(ledger, cli.quiet),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
