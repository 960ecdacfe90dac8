use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use chainsdn::scenario::{builtin, parse_scenario, run};
use chainsdn::{Scenario, VerifyMode};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chainsdn", version, about = "Ledger-backed multi-controller SDN simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write metrics.csv, events.csv, chain.log and summary.txt.
    Run {
        /// Scenario file, or `case_a` / `case_b` for a built-in one.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario's run length.
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long, value_parser = parse_mode)]
        verify_mode: Option<VerifyMode>,
        /// Verification latency in ticks (immediate mode only).
        #[arg(long)]
        verify_delay: Option<u64>,
    },
    /// Print a scenario in canonical form.
    Show {
        #[arg(long)]
        scenario: String,
    },
}

fn parse_mode(s: &str) -> Result<VerifyMode, String> {
    s.parse()
}

fn load(name: &str) -> Result<Scenario> {
    let text = match builtin(name) {
        Some(t) => t.to_string(),
        None => std::fs::read_to_string(name).with_context(|| format!("reading scenario `{name}`"))?,
    };
    parse_scenario(&text).with_context(|| format!("parsing scenario `{name}`"))
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            scenario,
            out,
            ticks,
            verify_mode,
            verify_delay,
        } => {
            let mut s = load(&scenario)?;
            if let Some(t) = ticks {
                s.ticks = t;
            }
            if let Some(m) = verify_mode {
                s.verify_mode = m;
            }
            if let Some(d) = verify_delay {
                s.verify_delay_ticks = d;
            }
            let summary = run(&s, &out).with_context(|| format!("running `{scenario}`"))?;
            print!("{}", summary.to_text());
            Ok(ExitCode::from(summary.exit_code() as u8))
        }
        Command::Show { scenario } => {
            print!("{}", load(&scenario)?.to_text());
            Ok(ExitCode::SUCCESS)
        }
    }
}
