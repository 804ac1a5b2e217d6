//! Configuration-driven front end for the `sectorcav` library.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{ExcitationConfig, GridConfig, RunConfig, SweepConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "sectorcav",
    version,
    about = "Cavity-model analysis of annular-sector patch antennas"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir`, default `out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Excitation preset; overrides `excitation`.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Pattern grid step in degrees for both theta and phi.
    #[arg(long, global = true)]
    pub grid: Option<f64>,
    /// Suppress progress and warnings.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resonant mode table.
    Modes,
    /// Interior E_z map of port 1.
    Field,
    /// Embedded far-field pattern of port 1.
    Pattern,
    /// Superposed pattern and metrics for the excitation.
    Synth,
    /// Metrics of a pattern file, or of the configured synthesis.
    Metrics {
        /// Pattern CSV to evaluate instead of synthesizing.
        #[arg(long)]
        pattern: Option<PathBuf>,
    },
    /// Parameter sweep.
    Sweep {
        /// r_i, r_e, alpha, eps_r or frequency.
        #[arg(long)]
        param: Option<String>,
        /// First value, in the parameter's config units.
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        /// Number of points; 0 writes the header only.
        #[arg(long)]
        points: Option<usize>,
        /// Add pattern metrics columns (slow).
        #[arg(long)]
        with_metrics: bool,
    },
}

/// Config with command-line overrides applied.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config {
        field: "--config".into(),
        detail: "a configuration file is required".into(),
    })?;
    let mut c = RunConfig::load(path)?;
    if let Some(p) = &cli.preset {
        c.excitation = Some(ExcitationConfig::Preset(p.clone()));
    }
    if let Some(g) = cli.grid {
        c.grid = GridConfig {
            theta_step_deg: g,
            phi_step_deg: g,
        };
    }
    if let Command::Sweep {
        param,
        start,
        stop,
        points,
        with_metrics,
    } = &cli.command
    {
        if param.is_some() || start.is_some() || stop.is_some() || points.is_some() {
            let base = c.sweep.clone();
            let pick = |v: Option<f64>, b: Option<f64>, name: &str| {
                v.or(b).ok_or_else(|| CliError::Config {
                    field: "sweep".into(),
                    detail: format!("--{name} is required"),
                })
            };
            c.sweep = Some(SweepConfig {
                parameter: param
                    .clone()
                    .or(base.as_ref().map(|s| s.parameter.clone()))
                    .ok_or_else(|| CliError::Config {
                        field: "sweep".into(),
                        detail: "--param is required".into(),
                    })?,
                start: pick(*start, base.as_ref().map(|s| s.start), "start")?,
                stop: pick(*stop, base.as_ref().map(|s| s.stop), "stop")?,
                points: points.or(base.as_ref().map(|s| s.points)).unwrap_or(11),
                metrics: *with_metrics || base.as_ref().is_some_and(|s| s.metrics),
            });
        } else if *with_metrics {
            if let Some(s) = c.sweep.as_mut() {
                s.metrics = true;
            }
        }
    }
    Ok(c)
}

/// Runs one invocation and returns the written files.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let config = effective_config(cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = commands::Context::new(config, out, cli.quiet)?;
    match &cli.command {
        Command::Modes => commands::cmd_modes(&ctx),
        Command::Field => commands::cmd_field(&ctx),
        Command::Pattern => commands::cmd_pattern(&ctx),
        Command::Synth => commands::cmd_synth(&ctx),
        Command::Metrics { pattern } => commands::cmd_metrics(&ctx, pattern.as_deref()),
        Command::Sweep { .. } => commands::cmd_sweep(&ctx),
    }
}
