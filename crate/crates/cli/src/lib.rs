//! Command-line front end for `cnls-core`: reads a TOML run config, runs one
//! experiment and writes CSV tables plus a `manifest.toml` that can be fed
//! back as a config to reproduce the run.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{ProfileSpec, RunConfig, Setup};
pub use error::CliError;
pub use output::Table;

pub const OUT_DIR_ENV: &str = "CNLS_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "cnls", version, about = "Coupled NLS ground states, spectra and comparison criteria")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "cnls-out")]
    pub out: PathBuf,
    /// Seed for randomized initial data; overrides `seed` in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Scalar soliton by shooting and Newton polish.
    #[command(after_help = "Writes scalar.csv: dimension,peak,residual,method\n       scalar_profile.csv: r,w")]
    Scalar,
    /// Ground state by Nehari-projected descent.
    #[command(after_help = "Writes ground.csv: energy,grad_sup,nehari_residual,iterations,converged,peak_u,peak_v\n       ground_profile.csv: x,u,v")]
    Ground,
    /// Warm-started continuation over the `kappas` list.
    #[command(after_help = "Writes sweep.csv: kappa0,energy,peak_u,peak_v,iterations,converged")]
    SweepKappa,
    /// Linearized eigenvalues and the nondegeneracy verdict.
    #[command(after_help = "Writes spectrum.csv: beta0,kappa0,w0,k_indicator,verdict,kernel_dim,sigma_min_a,sigma_min_b,agrees\n       eigenvalues.csv: index,eigenvalue")]
    Spectrum,
    /// Barycenter of the pair stored in `pair_file`.
    #[command(after_help = "Writes barycenter.csv: component,xi")]
    Barycenter,
    /// Energy along the translated path of the limit ground state at each `ys` entry.
    #[command(after_help = "Writes gamma.csv: y,t_y,energy,c0,xi (xi empty on radial grids)")]
    Gamma,
    /// The R0 threshold against c~0/c0.
    #[command(after_help = "Writes threshold.csv: r0,c0,c_tilde0,ratio_bound,satisfied")]
    Threshold,
    /// Sufficient conditions for the perturbed level to drop below the limit level.
    #[command(after_help = "Writes compare.csv: lhs01,rhs01,crit01,crit_less2,crit02,crit03,crit04,equal_components,conclusion")]
    Compare,
    /// Barycenter-penalized minimization.
    #[command(after_help = "Writes bound.csv: energy,c0,margin,xi,iterations,converged\n       bound_profile.csv: x,u,v")]
    Bound,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scalar => "scalar",
            Command::Ground => "ground",
            Command::SweepKappa => "sweep-kappa",
            Command::Spectrum => "spectrum",
            Command::Barycenter => "barycenter",
            Command::Gamma => "gamma",
            Command::Threshold => "threshold",
            Command::Compare => "compare",
            Command::Bound => "bound",
        }
    }
}

/// Runs `command` on a validated setup without touching the filesystem.
pub fn execute(command: Command, setup: &Setup) -> Result<Vec<Table>, CliError> {
    match command {
        Command::Scalar => commands::scalar(setup),
        Command::Ground => commands::ground(setup),
        Command::SweepKappa => commands::sweep_kappa(setup),
        Command::Spectrum => commands::spectrum(setup),
        Command::Barycenter => commands::barycenter_cmd(setup),
        Command::Gamma => commands::gamma(setup),
        Command::Threshold => commands::threshold(setup),
        Command::Compare => commands::compare(setup),
        Command::Bound => commands::bound(setup),
    }
}

/// Loads and validates the config, runs the command, then writes all tables
/// and the manifest into `out`. Returns the written paths.
pub fn run(
    command: Command,
    config_path: &Path,
    out: &Path,
    seed: Option<u64>,
) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = RunConfig::load(config_path)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    let setup = cfg.validate()?;
    let tables = execute(command, &setup)?;
    std::fs::create_dir_all(out).map_err(|source| CliError::Output {
        path: out.to_path_buf(),
        source,
    })?;
    let mut written = Vec::with_capacity(tables.len() + 1);
    for t in &tables {
        written.push(t.write(out)?);
    }
    written.push(output::write_manifest(out, command.name(), &setup.config)?);
    Ok(written)
}

/// Entry point shared by the binary: returns the process exit code.
pub fn main_with(cli: Cli) -> u8 {
    let Some(config) = cli.config.as_deref() else {
        eprintln!("error: --config <path> is required");
        return 1;
    };
    let go = || run(cli.command, config, &cli.out, cli.seed);
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(go),
            Err(e) => {
                eprintln!("error: cannot start {n} threads: {e}");
                return 1;
            }
        },
        None => go(),
    };
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
