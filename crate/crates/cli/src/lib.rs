//! Command-line front end for `dicke-dyn`.
//!
//! Every command reads an optional TOML config (see [`config`]), writes its
//! tables as CSV or JSON into `--out`, and records what it wrote in
//! `<command>.manifest.json`. `validate` re-reads those files and
//! re-checks their invariants.
//!
//! Exit codes: 0 success, 1 validation failure, 2 configuration error,
//! 3 degenerate analytic regime, 4 computational failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod validate;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Format, OutDir};

#[derive(Debug, Parser)]
#[command(name = "dicke-dyn", version, about = "Semiclassical dynamics of the extended Dicke model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for batch work.
    #[arg(long, global = true, env = "DICKE_DYN_THREADS")]
    pub threads: Option<usize>,

    /// Table format; the default depends on the command.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Stationary points, stability, critical coupling and order parameter.
    FixedPoints,
    /// Closed-form orbit on the slow manifold.
    BoundLuminosity,
    /// One trajectory of the full or reduced flow.
    Simulate,
    /// Poincaré sections over a grid of energies and couplings.
    Poincare,
    /// Cosine and quartic effective potentials.
    Potential,
    /// Largest Lyapunov exponents.
    Lyapunov,
    /// Re-check emitted files; takes the output directory, a manifest or a single file.
    Validate {
        #[arg(long)]
        path: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Command::Validate { path } = &cli.command {
        return validate::run(path.as_ref().unwrap_or(&cli.out));
    }
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.override_seed(seed);
    }
    let ctx = Context { config, out: OutDir::create(cli.out.clone())?, format: cli.format };
    match cli.command {
        Command::FixedPoints => commands::fixed_points::run(&ctx),
        Command::BoundLuminosity => commands::bound_luminosity::run(&ctx),
        Command::Simulate => commands::simulate::run(&ctx),
        Command::Poincare => commands::poincare::run(&ctx),
        Command::Potential => commands::potential::run(&ctx),
        Command::Lyapunov => commands::lyapunov::run(&ctx),
        Command::Validate { .. } => unreachable!("handled above"),
    }
}
