//! `monolab`: runs the monodromy experiments from JSON configs and writes
//! CSV/JSON results together with a `manifest.json`.
//!
//! Exit codes: 0 pass, 1 numeric check failed, 2 ambiguous classification,
//! 3 configuration or input error.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use output::{config_hash, Format, Sink};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("ambiguous classification: {0}")]
    Ambiguous(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(_) => 1,
            CliError::Ambiguous(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "monolab", version, about = "Numerical experiments on quantum monodromy near closed orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweep cells.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral normal form of a symplectic matrix.
    Classify {
        /// Matrix file: JSON rows or whitespace-separated rows.
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Conjugated contraction of the model monodromy over an h sweep.
    Contract {
        #[command(flatten)]
        common: Common,
    },
    /// Quantization ladder and its counting function.
    Ladder {
        #[command(flatten)]
        common: Common,
    },
    /// Closed geodesics of the warped metric and a sample trajectory.
    Geodesic {
        #[command(flatten)]
        common: Common,
    },
    /// Sampled positivity of the escape-function derivative.
    Positivity {
        #[command(flatten)]
        common: Common,
    },
}

fn run(cmd: Command) -> Result<Option<String>, CliError> {
    let started = Instant::now();
    let (name, common) = match &cmd {
        Command::Classify { common, .. } => ("classify", common),
        Command::Contract { common } => ("contract", common),
        Command::Ladder { common } => ("ladder", common),
        Command::Geodesic { common } => ("geodesic", common),
        Command::Positivity { common } => ("positivity", common),
    };
    if common.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    let cfg_path = common.config.as_deref();
    let mut sink = Sink::new(&common.out, common.format)?;
    let (outcome, hash) = pool.install(|| -> Result<_, CliError> {
        Ok(match &cmd {
            Command::Classify { matrix, .. } => {
                let cfg: config::ClassifyConfig = config::load(cfg_path)?;
                let (m, bytes) = commands::read_matrix(matrix)?;
                (commands::classify(&m, &cfg, &mut sink)?, config_hash(&cfg, &[&bytes]))
            }
            Command::Contract { .. } => {
                let cfg: config::ContractConfig = config::load(cfg_path)?;
                (commands::contract(&cfg, common.seed, &mut sink)?, config_hash(&cfg, &[]))
            }
            Command::Ladder { .. } => {
                let cfg: config::LadderConfig = config::load(cfg_path)?;
                (commands::ladder(&cfg, &mut sink)?, config_hash(&cfg, &[]))
            }
            Command::Geodesic { .. } => {
                let cfg: config::GeodesicConfig = config::load(cfg_path)?;
                (commands::geodesic(&cfg, &mut sink)?, config_hash(&cfg, &[]))
            }
            Command::Positivity { .. } => {
                let cfg: config::PositivityConfig = config::load(cfg_path)?;
                (commands::positivity(&cfg, common.seed, &mut sink)?, config_hash(&cfg, &[]))
            }
        })
    })?;
    sink.manifest(name, hash, common.seed, started.elapsed().as_secs_f64())?;
    Ok(outcome)
}

fn out_dir_hint(cmd: &Command) -> &Path {
    match cmd {
        Command::Classify { common, .. }
        | Command::Contract { common }
        | Command::Ladder { common }
        | Command::Geodesic { common }
        | Command::Positivity { common } => &common.out,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = out_dir_hint(&cli.command).to_path_buf();
    match run(cli.command) {
        Ok(None) => {
            println!("pass; results in {}", dir.display());
            ExitCode::SUCCESS
        }
        Ok(Some(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
