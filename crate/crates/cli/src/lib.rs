//! Command-line front end: reads a configuration document, runs one of the
//! calculators and prints a deterministic report.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use localsft::ErrorClass;
use thiserror::Error;

pub use config::{ConfigDocument, Model};
pub use report::{Format, Report, Section};

#[derive(Debug, Parser)]
#[command(name = "localsft", version, about = "Exact bookkeeping for local SFT of multiple covers")]
pub struct Cli {
    /// Configuration document (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "table", global = true)]
    pub format: Format,

    /// Overrides the truncation order from the configuration.
    #[arg(long, global = true)]
    pub truncation: Option<u32>,

    /// Include derivation traces.
    #[arg(long, global = true)]
    pub trace: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conley-Zehnder indices of every declared orbit iterate.
    Cz { orbit: Option<String> },
    /// Fredholm indices and branch counts of the declared covers.
    Index,
    /// Dimensions and obstruction-bundle ranks of the declared covers.
    Moduli,
    /// Codimension-one boundary strata of a cover.
    Strata { cover: Option<String> },
    /// Connected Hurwitz count.
    Hurwitz {
        #[arg(long)]
        degree: u32,
        /// Ramification profile such as `2,1`; repeatable.
        #[arg(long = "profile", value_delimiter = ';')]
        profiles: Vec<String>,
        #[arg(long, default_value_t = 0)]
        simple: u32,
    },
    /// Local Hamiltonians of orbit tables, with the vanishing check.
    Hamiltonian { table: Option<String> },
    /// Potentials of count tables.
    Potential { table: Option<String> },
    /// The `#` composition of two table potentials.
    Compose {
        lower: String,
        upper: String,
        #[arg(long, default_value_t = 4)]
        order: u32,
    },
    /// The descendant count of an exceptional sphere, with its trace.
    Exceptional { curve: Option<String> },
    /// Splitting equations and the elliptic-orbit test for declared necks.
    Neckstretch { neck: Option<String> },
    /// Runs every invariant check on the configuration.
    Check,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] localsft::Error),
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "PARSE",
            CliError::Io(_) => "IO",
            CliError::Usage(_) => "USAGE",
            CliError::Core(e) => e.code(),
            CliError::CheckFailed(_) => "CHECK_FAILED",
        }
    }

    /// 1 validation failure, 2 parse or usage error, 3 hypothesis violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::Core(localsft::Error::Parse(_)) => 2,
            CliError::Core(e) => match e.class() {
                ErrorClass::Hypothesis => 3,
                ErrorClass::Validation => 1,
            },
            CliError::CheckFailed(_) => 1,
        }
    }

    /// The single line printed on failure.
    pub fn line(&self) -> String {
        format!("error: {}: {}", self.code(), self.to_string().replace('\n', " "))
    }
}

/// A report, possibly followed by a failure that sets the exit status.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub failure: Option<CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, CliError::exit_code)
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match commands::dispatch(cli) {
        Ok(outcome) => outcome,
        Err(e) => Outcome {
            report: Report::default(),
            failure: Some(e),
        },
    }
}
