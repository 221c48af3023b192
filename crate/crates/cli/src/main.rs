//! `dnls`: command-line driver for the lattice soliton toolkit.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, ConfigFile, Grid, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or parameters; exit status 2.
    Config(String),
    /// A computation failed; exit status 3.
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<dnls_core::Error> for CliError {
    fn from(e: dnls_core::Error) -> Self {
        use dnls_core::Error::*;
        match e {
            InvalidParams(_) | NotAllReal(_) | ParamsMismatch | DimensionMismatch { .. } | Io(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "dnls", version, about = "Stationary solitons of a DNLS lattice with next-nearest-neighbour coupling")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Characteristic polynomials, discriminants and eigenvalues at the fixed points.
    Eigen(Flags),
    /// Stable and unstable manifold series with conjugacy residuals.
    Manifold(Flags),
    /// Homoclinic points at each (epsilon, A).
    Homoclinic(Flags),
    /// Homoclinic search over an (epsilon, A) grid.
    Scan(Flags),
    /// Transversality determinant along A at fixed epsilon, with a polynomial fit.
    Transversality(Flags),
    /// Soliton profile built from the symmetric homoclinic orbit.
    Soliton(Flags),
    /// Phase-portrait orbits of the planar map.
    Portrait(Flags),
}

#[derive(Args, Clone)]
struct Flags {
    /// Coupling strength; comma-separated for a grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    epsilon: Option<Vec<f64>>,
    /// Next-nearest-neighbour weight; comma-separated for a grid.
    #[arg(long = "A", value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<f64>>,
    /// Series truncation order [default: 80].
    #[arg(long)]
    order: Option<usize>,
    /// Acceptance threshold on the matching residual [default: 1e-10].
    #[arg(long)]
    threshold: Option<f64>,
    /// Half-width of the parameter box [default: 1].
    #[arg(long = "box")]
    half_width: Option<f64>,
    /// Seed lattice side for Newton starts [default: 21].
    #[arg(long)]
    seeds: Option<usize>,
    /// Output directory [default: .].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for scans [default: all cores].
    #[arg(long)]
    workers: Option<usize>,
    /// Iterations per portrait orbit [default: 1000].
    #[arg(long)]
    steps: Option<usize>,
    /// Amplitude at which soliton tails stop [default: 1e-14].
    #[arg(long)]
    floor: Option<f64>,
    /// Degree of the transversality fit [default: 4].
    #[arg(long)]
    degree: Option<usize>,
    /// JSON file with any of the above keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn into_config(self) -> (Option<PathBuf>, ConfigFile) {
        let f = ConfigFile {
            epsilon: self.epsilon.map(Grid::Many),
            a: self.a.map(Grid::Many),
            order: self.order,
            threshold: self.threshold,
            half_width: self.half_width,
            seeds: self.seeds,
            out: self.out,
            workers: self.workers,
            steps: self.steps,
            floor: self.floor,
            degree: self.degree,
        };
        (self.config, f)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, flags) = match cli.command {
        Sub::Eigen(f) => (Command::Eigen, f),
        Sub::Manifold(f) => (Command::Manifold, f),
        Sub::Homoclinic(f) => (Command::Homoclinic, f),
        Sub::Scan(f) => (Command::Scan, f),
        Sub::Transversality(f) => (Command::Transversality, f),
        Sub::Soliton(f) => (Command::Soliton, f),
        Sub::Portrait(f) => (Command::Portrait, f),
    };
    let (path, from_flags) = flags.into_config();
    let base = match path {
        Some(p) => ConfigFile::load(&p)?,
        None => ConfigFile::default(),
    };
    let cfg = RunConfig::resolve(command, base.overlay(from_flags))?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", cfg.out.display())))?;
    commands::dispatch(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dnls: {e}");
            ExitCode::from(e.code())
        }
    }
}
