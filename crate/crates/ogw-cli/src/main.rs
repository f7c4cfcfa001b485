use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ogw::bounding::BoundingError;
use ogw::rational::parse_q;
use ogw::superpotential::SuperpotentialError;
use thiserror::Error;

mod commands;
mod scenario;

use scenario::{Overrides, Scenario};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("truncation fault: {0}")]
    Truncation(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Config(_) => 2,
            CliError::Truncation(_) => 3,
        }
    }
}

impl From<BoundingError> for CliError {
    fn from(e: BoundingError) -> Self {
        if e.is_truncation() {
            CliError::Truncation(e.to_string())
        } else {
            CliError::Failure(e.to_string())
        }
    }
}

impl From<SuperpotentialError> for CliError {
    fn from(e: SuperpotentialError) -> Self {
        if e.is_truncation() {
            CliError::Truncation(e.to_string())
        } else {
            CliError::Failure(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ogw", version, about = "Bounding chains and open Gromov-Witten superpotentials from scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the structural verifiers on the q-operator store.
    Verify(Common),
    /// Solve for a bounding pair and certify it.
    Solve(Common),
    /// Print the superpotential.
    Omega(Common),
    /// Print the invariant table.
    Ogw(Common),
    /// Check the degree, zero, unit and divisor axioms.
    Axioms(Common),
    /// Compare the superpotentials obtained with two gauges.
    GaugeCheck(Common),
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Solve cutoff, an exact rational such as 3 or 7/2.
    #[arg(long)]
    cutoff: Option<String>,
    /// Seed for synthesized stores.
    #[arg(long)]
    seed: Option<u64>,
    /// Gauge: canonical, shifted or shifted:<rational>.
    #[arg(long)]
    gauge: Option<String>,
    /// Directory that receives a copy of the output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Rows,
}

/// What a command produced: its output and whether every check in it passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Solve(_) => "solve",
            Command::Omega(_) => "omega",
            Command::Ogw(_) => "ogw",
            Command::Axioms(_) => "axioms",
            Command::GaugeCheck(_) => "gauge-check",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Verify(c)
            | Command::Solve(c)
            | Command::Omega(c)
            | Command::Ogw(c)
            | Command::Axioms(c)
            | Command::GaugeCheck(c) => c,
        }
    }
}

fn run(command: &Command) -> Result<Outcome, CliError> {
    let common = command.common();
    let cutoff = match &common.cutoff {
        Some(c) => Some(parse_q(c).ok_or_else(|| CliError::Config(format!("--cutoff: `{c}` is not an exact rational")))?),
        None => None,
    };
    let overrides = Overrides { cutoff, seed: common.seed, gauge: common.gauge.clone() };
    let sc = Scenario::load(&common.scenario, &overrides)?;
    let format = common.format;
    match command {
        Command::Verify(_) => Ok(commands::verify(&sc)),
        Command::Solve(_) => commands::solve(&sc, format),
        Command::Omega(_) => commands::omega(&sc, format),
        Command::Ogw(_) => commands::ogw(&sc, format),
        Command::Axioms(_) => commands::axioms(&sc),
        Command::GaugeCheck(_) => commands::gauge_check(&sc),
    }
}

fn write_output(dir: &Path, name: &str, format: Format, text: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let ext = match format {
        Format::Text => "txt",
        Format::Rows => "rows",
    };
    std::fs::write(dir.join(format!("{name}.{ext}")), text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            let common = cli.command.common();
            if let Some(dir) = &common.out {
                if let Err(e) = write_output(dir, cli.command.name(), common.format, &outcome.text) {
                    eprintln!("error: cannot write to {}: {e}", dir.display());
                    return ExitCode::from(2);
                }
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
