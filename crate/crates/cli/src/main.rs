//! `geophase` command-line front end.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Parser)]
#[command(name = "geophase", version, about = "Geometric-phase gates on charge qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the single-qubit protocol and write its trajectory and phase report.
    SimulateSingle(Common),
    /// Find the offset step for a target phase.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// Target phase in (0, pi); accepts forms like `pi/2`.
        #[arg(long, allow_hyphen_values = true)]
        target_gamma: Option<String>,
    },
    /// Build the conditional two-qubit gate and score it.
    SimulateCnot(Common),
    /// Sweep delta (single qubit) or theta (two qubits) over a grid.
    Sweep(Common),
    /// Compare the two-level model with a truncated charge basis.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// symmetric | literal | instantaneous | finite | derived | paper_literal
    #[arg(long)]
    mode: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Samples per segment.
    #[arg(long)]
    samples: Option<usize>,
    /// closed | rk4
    #[arg(long)]
    method: Option<String>,
}

/// Exit status plus message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const ASSERTION: u8 = 1;
    pub const BAD_INPUT: u8 = 2;
    pub const CONTRACT: u8 = 3;

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: Self::BAD_INPUT, message: message.into() }
    }

    pub fn contract(message: impl Into<String>) -> Self {
        Self { code: Self::CONTRACT, message: message.into() }
    }
}

impl From<geophase::Error> for Failure {
    fn from(e: geophase::Error) -> Self {
        if e.is_contract_violation() {
            Self::contract(e.to_string())
        } else {
            Self::input(e.to_string())
        }
    }
}

fn resolve(common: &Common, target_gamma: Option<&str>) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
            RunConfig::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    let set = |cfg: &mut RunConfig, key: &str, value: &str| cfg.set(key, value).map_err(|e| Failure::input(format!("--{key}: {e}")));
    if let Some(v) = &common.delta {
        set(&mut cfg, "delta", v)?;
    }
    if let Some(v) = &common.theta {
        set(&mut cfg, "theta", v)?;
    }
    if let Some(v) = target_gamma {
        set(&mut cfg, "target_gamma", v)?;
    }
    if let Some(v) = &common.method {
        set(&mut cfg, "method", v)?;
    }
    if let Some(v) = &common.mode {
        cfg.set_mode(v).map_err(|e| Failure::input(format!("--mode: {e}")))?;
    }
    if let Some(v) = &common.out {
        cfg.out = v.clone();
    }
    if let Some(n) = common.samples {
        cfg.samples = n;
    }
    if cfg.samples < 2 {
        return Err(Failure::input(format!("samples must be at least 2, got {}", cfg.samples)));
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::SimulateSingle(c) => commands::simulate_single(&resolve(&c, None)?),
        Command::Calibrate { common, target_gamma } => commands::calibrate(&resolve(&common, target_gamma.as_deref())?),
        Command::SimulateCnot(c) => commands::simulate_cnot(&resolve(&c, None)?),
        Command::Sweep(c) => commands::sweep(&resolve(&c, None)?),
        Command::Validate(c) => commands::validate(&resolve(&c, None)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
