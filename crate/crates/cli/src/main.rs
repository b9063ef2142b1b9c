//! `pps`: exact verification for graded-graph product systems.
//!
//! Reads a system specification file, runs one verification command, and
//! prints a deterministic report. Exit codes: 0 all checks pass, 1 a
//! property was refuted (the report carries a witness), 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pps_cli::commands::{self, CommandError};
use pps_cli::report::Report;
use pps_cli::specfile::{parse_spec, SpecFile};

#[derive(Parser)]
#[command(
    name = "pps",
    version,
    about = "Exact checks for graded-graph product systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit flat key-value output (`schema=1`) instead of prose.
    #[arg(long, global = true)]
    machine: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check every axiom of the graded graph data.
    Validate { file: PathBuf },
    /// Decide unique factorization into irreducibles.
    Pathcat { file: PathBuf },
    /// Check the Fock covariance identity up to a truncation.
    Repcheck {
        #[arg(long)]
        trunc: u32,
        file: PathBuf,
    },
    /// Print a creation operator on the truncated Fock module.
    Fock {
        #[arg(long)]
        trunc: u32,
        #[arg(long)]
        element: String,
        file: PathBuf,
    },
    /// Multiply two generators in normal form and verify against the
    /// Fock-matrix oracle. Generators are written `<alpha>|<beta>`.
    Mult {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long)]
        trunc: u32,
        file: PathBuf,
    },
    /// Enumerate invariant ideals, quotients, and the J_max verdict.
    Ideals { file: PathBuf },
    /// Print the Katsura ideal and verify the Cuntz–Krieger relations.
    Katsura {
        #[arg(long)]
        horizon: u32,
        file: PathBuf,
    },
    /// Verify the Cuntz–Krieger kernel elements at a horizon.
    Ck {
        #[arg(long)]
        horizon: u32,
        file: PathBuf,
    },
    /// Decide Fell-bundle extendability and verify the bundle axioms.
    Fell {
        #[arg(long)]
        degree: u32,
        file: PathBuf,
    },
}

impl Command {
    fn file(&self) -> &PathBuf {
        match self {
            Command::Validate { file }
            | Command::Pathcat { file }
            | Command::Repcheck { file, .. }
            | Command::Fock { file, .. }
            | Command::Mult { file, .. }
            | Command::Ideals { file }
            | Command::Katsura { file, .. }
            | Command::Ck { file, .. }
            | Command::Fell { file, .. } => file,
        }
    }
}

fn load(path: &PathBuf) -> Result<SpecFile, CommandError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CommandError(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| CommandError(e.to_string()))
}

fn run(cli: &Cli) -> Result<Report, CommandError> {
    let spec = load(cli.command.file())?;
    let sys = spec.build().map_err(|e| CommandError(e.to_string()))?;
    match &cli.command {
        Command::Validate { .. } => Ok(commands::cmd_validate(&spec, &sys)),
        Command::Pathcat { .. } => commands::cmd_pathcat(&spec, &sys),
        Command::Repcheck { trunc, .. } => commands::cmd_repcheck(&spec, &sys, *trunc),
        Command::Fock { trunc, element, .. } => commands::cmd_fock(&spec, &sys, *trunc, element),
        Command::Mult {
            lhs, rhs, trunc, ..
        } => commands::cmd_mult(&spec, &sys, lhs, rhs, *trunc),
        Command::Ideals { .. } => commands::cmd_ideals(&spec, &sys),
        Command::Katsura { horizon, .. } => commands::cmd_katsura(&spec, &sys, *horizon),
        Command::Ck { horizon, .. } => commands::cmd_ck(&spec, &sys, *horizon),
        Command::Fell { degree, .. } => commands::cmd_fell(&spec, &sys, *degree),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.machine));
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
