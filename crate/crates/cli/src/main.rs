//! `aniso`: norms, operators, verification suites and report rendering for
//! temporally weighted fractional Sobolev spaces.

mod commands;
mod config;
mod render;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit codes.
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Lib(aniso_core::Error),
}

impl From<aniso_core::Error> for CliError {
    fn from(e: aniso_core::Error) -> Self {
        use aniso_core::Error as E;
        match e {
            E::DataFormat(m) | E::Io(m) => CliError::Data(m),
            E::NonFiniteSample { .. } => CliError::Data(e.to_string()),
            other => CliError::Lib(other),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Data(_) => EXIT_DATA,
            CliError::Usage(_) | CliError::Lib(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "aniso",
    version,
    about = "Weighted fractional Sobolev spaces: norms, operators, traces, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Parameter file and overrides shared by all subcommands.
#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    /// Flat `key = value` parameter file.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Parameter override `key=value`; repeatable, wins over the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm of a sampled function of time.
    Norm(commands::NormArgs),
    /// Applies an operator to sampled data.
    Op(commands::OpArgs),
    /// Runs a verification suite (or the whole battery).
    Verify(suites::VerifyArgs),
    /// Interpolation identity on an ensemble.
    Interp(commands::InterpArgs),
    /// Predicate tables over parameter grids and the T-uniformity sweep.
    Sweep(commands::SweepArgs),
    /// Closed-form reference values.
    Oracle(commands::OracleArgs),
    /// Renders a JSON report as text or CSV.
    Report(commands::ReportArgs),
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Norm(a) => commands::norm(a),
        Command::Op(a) => commands::op(a),
        Command::Verify(a) => suites::verify(a),
        Command::Interp(a) => commands::interp(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Report(a) => commands::report(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("aniso: {e}");
            ExitCode::from(e.code())
        }
    }
}
