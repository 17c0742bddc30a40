use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tt_flock::experiments::commands;

#[derive(Parser)]
#[command(
    name = "ttflock",
    about = "Toner-Tu flocking simulator and verification harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for initial data, ensembles and the oracle
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Config override `section.key=value` (repeatable)
    #[arg(long = "override", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Simulate,
    LinearDecay,
    FitDecay,
    VerifyInequalities,
    Oracle,
    SteadyCheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match commands::load_config(
        cli.config.as_deref(),
        &cli.overrides,
        cli.seed,
        cli.output.as_deref(),
    ) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let out = match cli.command {
        Command::Simulate => commands::simulate(&cfg),
        Command::LinearDecay => commands::linear_decay(&cfg),
        Command::FitDecay => commands::fit_decay(&cfg),
        Command::VerifyInequalities => commands::verify_inequalities(&cfg),
        Command::Oracle => commands::oracle(&cfg),
        Command::SteadyCheck => commands::steady_check(&cfg),
    };
    match out {
        Ok(o) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&o.report).unwrap_or_default()
            );
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
