use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use qjd_core::verify::IntRange;

/// Tolerance names accepted by `--tol`.
pub const TOL_NAMES: &[&str] = &[
    "commute_tol",
    "cluster_tol",
    "clamp_tol",
    "hermitian_tol",
    "trace_tol",
    "psd_tol",
    "unitary_tol",
    "agreement_tol",
    "covariance_tol",
    "axioms_tol",
    "sweep_slack",
    "sweep_cap",
];

const TOL_MAX: f64 = 1e-2;

#[derive(Debug, Parser)]
#[command(
    name = "qjd",
    version,
    about = "Joint distributions of quantum observables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Observable matrix file; repeat for a tuple, order is kept.
    #[arg(long = "obs", value_name = "FILE", global = true)]
    pub obs: Vec<PathBuf>,

    /// Density matrix file.
    #[arg(long, value_name = "FILE", global = true)]
    pub state: Option<PathBuf>,

    /// Write output here instead of standard output.
    #[arg(long, value_name = "FILE", global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Base seed; required by `verify` and `sweep`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Trials per suite (`verify`) or number of sweeps (`sweep`).
    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Matrix dimensions, `lo..hi` inclusive or a single value.
    #[arg(long, value_parser = parse_range, global = true)]
    pub dims: Option<IntRange>,

    /// Tuple sizes, `lo..hi` inclusive or a single value.
    #[arg(long, value_parser = parse_range, global = true)]
    pub nobs: Option<IntRange>,

    /// Tolerance override `name=value`, value in (0, 1e-2]; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol, global = true)]
    pub tol: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Spectral measure of each observable.
    Decompose,
    /// Joint distribution of the observable tuple in the state.
    Joint,
    /// Compare the joint distribution with the sequential, textbook and
    /// Margenau-Hill constructions.
    Baselines,
    /// Run the property suites.
    Verify,
    /// Continuity sweep; writes `t,w1_distance` rows.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

fn parse_range(s: &str) -> Result<IntRange, String> {
    s.parse().map_err(|e: qjd_core::QjdError| e.to_string())
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let name = name.trim();
    if !TOL_NAMES.contains(&name) {
        return Err(format!(
            "unknown tolerance `{name}`; known: {}",
            TOL_NAMES.join(", ")
        ));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    if !(value > 0.0 && value <= TOL_MAX) {
        return Err(format!(
            "{name} must lie in (0, {TOL_MAX:e}], got {value:e}"
        ));
    }
    Ok((name.to_string(), value))
}
