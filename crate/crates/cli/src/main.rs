use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

/// Batch runner: branch continuation, expansion extraction, order
/// classification and force construction.
#[derive(Parser, Debug)]
#[command(name = "nsgalerkin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Flat TOML configuration; overrides preset values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named bundled configuration.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Seed for random draws; overrides the configured one.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Continue a branch of steady states in alpha.
    Continue {
        #[command(flatten)]
        common: Common,
    },
    /// Extract the unitary expansion of a branch.
    Expand {
        #[command(flatten)]
        common: Common,
        /// Branch directory written by `continue`.
        #[arg(long)]
        branch: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Coefficient table, ordering and limit scenario of an expanded branch.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        branch: PathBuf,
        /// Expansion directory written by `expand`.
        #[arg(long)]
        expansion: PathBuf,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Build a force expansion plan or a vanishing-limit pair.
    Construct {
        #[command(flatten)]
        common: Common,
    },
}

/// Exit 1 for numerical failures, 2 for bad input.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<nsgalerkin::Error> for Failure {
    fn from(e: nsgalerkin::Error) -> Self {
        use nsgalerkin::Error::*;
        match e {
            Numerical(_) | SingularJacobian { .. } | NoConvergence { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Continue { common } => commands::run_continue(&common),
        Command::Expand { common, branch, depth } => commands::run_expand(&common, &branch, depth),
        Command::Classify {
            common,
            branch,
            expansion,
            k_max,
        } => commands::run_classify(&common, &branch, &expansion, k_max),
        Command::Construct { common } => commands::run_construct(&common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(match e {
                Failure::Numerical(_) => 1,
                Failure::Config(_) => 2,
            })
        }
    }
}
