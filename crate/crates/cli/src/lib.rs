//! Command-line experiments for the fluxonium controlled-Z simulator.
//!
//! Each experiment reads a TOML configuration, writes one CSV table and a
//! `.meta.toml` sidecar holding the fully resolved configuration. The sidecar
//! is itself a valid configuration file.

pub mod config;
mod experiments;
mod output;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use config::{ConfigError, ExperimentConfig};
pub use output::{sidecar_path, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// Single-qubit levels and matrix elements.
    Spectrum,
    /// Transitions among the lowest nine dressed states.
    CoupledSpectrum,
    /// Figures of merit and matrix elements versus coupling strength.
    FomSweep,
    /// Optimized gate error versus gate time.
    GateVsTime,
    /// Optimized gate error versus coupling strength at fixed gate time.
    GateVsCoupling,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Debug, Parser)]
#[command(name = "fluxcz", version, about = "Fluxonium controlled-Z gate experiments")]
pub struct Cli {
    pub experiment: Experiment,
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Override a configuration key, e.g. `--set drive.t_g=90`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output CSV path; the sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Model(fluxcz::Error),
    Output(String),
}

impl RunError {
    /// 2 for configuration errors, 3 for numerical failures, 4 when the
    /// optimizer cannot make progress, 1 for I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Model(fluxcz::Error::Optimizer(_)) => 4,
            RunError::Model(e) if e.is_numeric() => 3,
            RunError::Model(_) => 2,
            RunError::Output(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "configuration: {e}"),
            RunError::Model(e) => write!(f, "{e}"),
            RunError::Output(e) => write!(f, "output: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<fluxcz::Error> for RunError {
    fn from(e: fluxcz::Error) -> Self {
        RunError::Model(e)
    }
}

/// Resolves the configuration and runs one experiment without touching disk.
pub fn compute(kind: Experiment, mut config: ExperimentConfig) -> Result<(ExperimentConfig, Table), RunError> {
    config.resolve_sweep(kind);
    config.validate()?;
    let table = experiments::run(kind, &config)?;
    Ok((config, table))
}

pub fn run(cli: &Cli) -> Result<Table, RunError> {
    let config = ExperimentConfig::load(&cli.config, &cli.overrides)?;
    let (mut resolved, table) = compute(cli.experiment, config)?;
    table.write_csv(&cli.out)?;
    resolved.run = Some(config::RunInfo {
        experiment: cli.experiment.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        output: cli.out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        coupling_ghz: match resolved.coupling.strength {
            None => Some(resolved.coupling.resolve()?.strength),
            Some(_) => None,
        },
    });
    let meta = toml::to_string(&resolved).map_err(|e| RunError::Output(e.to_string()))?;
    let path = sidecar_path(&cli.out);
    std::fs::write(&path, meta).map_err(|e| RunError::Output(format!("{}: {e}", path.display())))?;
    Ok(table)
}
