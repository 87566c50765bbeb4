//! Command-line driver for the holonomic gate library.

pub mod commands;
pub mod config;
pub mod format;
pub mod verify;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    /// Carries the rendered report so the caller can still print it.
    #[error("verification failed: {summary}")]
    Verification { report: String, summary: String },
    #[error(transparent)]
    Library(#[from] holonomic::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Library(_) => 2,
            CliError::Verification { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}

/// Comma-separated list of numbers, e.g. `0,1e-3,-1e-3`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberList(pub Vec<f64>);

impl FromStr for NumberList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|part| {
                let part = part.trim();
                part.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("'{part}' is not a finite number"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(NumberList)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "holonomic",
    version,
    about = "Holonomic one-qubit gates under Rabi-frequency errors"
)]
pub struct Cli {
    /// key=value file; explicit flags override its entries
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the f1, f2, f3 comparison curves as CSV
    Figure1(Figure1Args),
    /// Exact and second-order fidelities over an error grid, as JSON
    Sweep(SweepArgs),
    /// Robust two-loop path (and the other schemes) for a target gate, as JSON
    Optimize(OptimizeArgs),
    /// Run the acceptance suite and print a report
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    TwoLoop,
    SingleLoop,
    SingleShot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct Figure1Args {
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Target gate and two-loop path options shared by `sweep` and `optimize`.
#[derive(Debug, Clone, Args)]
pub struct TargetArgs {
    /// Rotation angle ϑ in units of π, within [0, 0.5]
    #[arg(long, allow_hyphen_values = true)]
    pub theta_gate: Option<f64>,
    /// Rotation axis x,y,z (normalised)
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    pub axis: NumberList,
    /// Two-loop decomposition phase φ_b in units of π
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub phi_b: f64,
    /// Require cos θ₁ + cos θ₂ = 0 for the two-loop path
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub balanced: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub scheme: Scheme,
    #[command(flatten)]
    pub target: TargetArgs,
    /// Raw path angles in units of π instead of a target: two-loop θ₁,ψ₁,φ₁,θ₂,ψ₂,φ₂;
    /// single-loop θ,ψ,φ,φ′; single-shot α,β₀,β₁,γ
    #[arg(long, conflicts_with = "theta_gate", allow_hyphen_values = true)]
    pub params: Option<NumberList>,
    /// Common Rabi errors ε
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub epsilon: NumberList,
    /// Relative Rabi errors κ (two-loop only)
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub kappa: NumberList,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Fast)]
    pub level: Level,
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,
}

/// Parses (after config expansion) and runs one invocation, returning stdout text.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Figure1(args) => {
            let csv = commands::figure1_csv(args.samples, &commands::Curves::default())?;
            commands::emit(args.out.as_deref(), &csv)
        }
        Command::Sweep(args) => {
            let records = commands::sweep(&args)?;
            commands::emit(args.out.as_deref(), &commands::to_json(&records))
        }
        Command::Optimize(args) => {
            let report = commands::optimize(&args.target)?;
            commands::emit(args.out.as_deref(), &commands::to_json(&report))
        }
        Command::Verify(args) => {
            let report = verify::run(&verify::VerifyOptions {
                level: args.level,
                seed: args.seed,
                curves: commands::Curves::default(),
            });
            if report.passed() {
                Ok(report.render())
            } else {
                Err(CliError::Verification {
                    report: report.render(),
                    summary: report.failure_summary(),
                })
            }
        }
    }
}
