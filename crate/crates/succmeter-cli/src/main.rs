//! Batch front-end for the measurement-model library: reads one experiment
//! configuration (JSON), runs the selected workflow, and writes tables and
//! reports for offline analysis.
//!
//! Exit codes: 0 ok, 2 parse, 3 validation, 4 numerical. Failures print a
//! single machine-readable JSON line on stderr.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Context, Format};
use error::CliResult;

#[derive(Parser)]
#[command(name = "succmeter", version, about = "von Neumann measurement simulations with arbitrary meter coupling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the generated artifacts
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Format for table outputs
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Pointer density, pointer mean, and reduced state for one measurement
    Single(CommonArgs),
    /// Quasi-probability table and both two-pointer correlations
    Quasiprob(CommonArgs),
    /// Kirkwood, Margenau-Hill, and Wigner-rule tables
    Limits(CommonArgs),
    /// Simulate projector-pair correlations and reconstruct the state
    Reconstruct(CommonArgs),
    /// Compare analytic statistics against the grid-quadrature oracle
    OracleCheck(CommonArgs),
    /// Scan the quasi-probability over the configured coupling list
    Scan(CommonArgs),
    /// Run the workflow named in the config file
    Run(CommonArgs),
}

fn dispatch(command: &Command) -> CliResult<()> {
    let (args, runner): (&CommonArgs, fn(&config::Resolved, &Context) -> CliResult<()>) =
        match command {
            Command::Single(a) => (a, commands::run_single),
            Command::Quasiprob(a) => (a, commands::run_quasiprob),
            Command::Limits(a) => (a, commands::run_limits),
            Command::Reconstruct(a) => (a, commands::run_reconstruct),
            Command::OracleCheck(a) => (a, commands::run_oracle_check),
            Command::Scan(a) => (a, commands::run_scan),
            Command::Run(a) => (a, commands::run_named),
        };
    let loaded = config::load_config(&args.config)?;
    let resolved = config::resolve(&loaded.config)?;
    let ctx = Context {
        out_dir: &args.out,
        format: args.format,
        config_hash: &loaded.hash,
    };
    runner(&resolved, &ctx)
}

fn main() -> ExitCode {
    succmeter::exec::configure_threads_from_env();
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "category": e.category(), "message": e.to_string() })
            );
            ExitCode::from(e.exit_code())
        }
    }
}
