//! `modsetlab` command-line front end.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Params;

pub const EXIT_PARAMETER: u8 = 1;
pub const EXIT_ASSERTION: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Param(String),
    Assertion(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Param(_) => EXIT_PARAMETER,
            Failure::Assertion(_) => EXIT_ASSERTION,
            Failure::Resource(_) => EXIT_RESOURCE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Param(m) | Failure::Assertion(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<modsetlab::Error> for Failure {
    fn from(e: modsetlab::Error) -> Self {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else if matches!(e, modsetlab::Error::Invariant(_)) {
            Failure::Assertion(e.to_string())
        } else {
            Failure::Param(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Param(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Param(format!("json error: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "modsetlab",
    version,
    about = "Sumsets and difference sets of random subsets of Z/nZ"
)]
struct Cli {
    /// TOML file of parameters; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw random sets and write one CSV row per trial
    Sample {
        #[command(flatten)]
        params: Params,
    },
    /// Evaluate a closed form exactly
    Exact {
        #[arg(value_enum)]
        formula: commands::Formula,
        /// Shorthand for --n
        value: Option<u64>,
        #[command(flatten)]
        params: Params,
    },
    /// Compare exhaustive enumeration with the closed forms
    Oracle {
        #[arg(long, value_enum)]
        event: commands::OracleEvent,
        #[command(flatten)]
        params: Params,
    },
    /// Run a regime sweep and its convergence report
    Sweep {
        #[command(flatten)]
        params: Params,
    },
    /// Build and classify a sum or difference graph
    Graphs {
        #[arg(long, value_enum)]
        mode: commands::GraphMode,
        #[arg(long, value_enum, default_value = "json")]
        format: commands::GraphFormat,
        #[command(flatten)]
        params: Params,
    },
    /// Run the acceptance criteria
    Acceptance {
        /// Criterion numbers to run (default: all)
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
        /// Print the reports as JSON
        #[arg(long)]
        json: bool,
    },
}

fn resolve(flags: Params, config: Option<&PathBuf>) -> Result<Params, Failure> {
    match config {
        Some(path) => Ok(flags.over(config::load_file(path)?)),
        None => Ok(flags),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = cli.config.as_ref();
    match cli.command {
        Command::Sample { params } => commands::sample(&resolve(params, cfg)?),
        Command::Exact {
            formula,
            value,
            params,
        } => {
            let mut p = resolve(params, cfg)?;
            if let Some(v) = value {
                p.n = vec![v];
            }
            commands::exact(formula, &p)
        }
        Command::Oracle { event, params } => commands::oracle(event, &resolve(params, cfg)?),
        Command::Sweep { params } => commands::sweep(&resolve(params, cfg)?),
        Command::Graphs {
            mode,
            format,
            params,
        } => commands::graphs(mode, format, &resolve(params, cfg)?),
        Command::Acceptance { criterion, json } => commands::acceptance(&criterion, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAMETER } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
