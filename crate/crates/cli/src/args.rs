//! Flags of the `freejacobi` binary.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "freejacobi", version, about = "Liberated symmetries and the free Jacobi process")]
pub struct Cli {
    /// Worker threads (falls back to FREEJACOBI_THREADS, then to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density and moments of the free unitary Brownian motion.
    Fubm(FubmArgs),
    /// The law of R U_t S U_t* for an initial law.
    Liberation(LiberationArgs),
    /// The law of P U_t Q U_t* P on [0, 1].
    Jacobi(JacobiArgs),
    /// The long-time law of R U_t S U_t*.
    Stationary(StationaryArgs),
    /// Moments from the moment hierarchy.
    Moments(MomentsArgs),
    /// Run verification suites and write a pass/fail report.
    Verify(VerifyArgs),
}

/// Output location: a `.csv` (or `.json`) file, or a directory.
#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FubmArgs {
    #[arg(long)]
    pub t: f64,
    /// Rows of the output table (uniform angles).
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    /// Density nodes used internally.
    #[arg(long, default_value_t = 4096)]
    pub nodes: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LiberationArgs {
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Initial law as JSON, e.g. '{"tag":"free"}'.
    #[arg(long, default_value = r#"{"tag":"classical"}"#)]
    pub init: String,
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    #[arg(long, default_value_t = freejacobi_core::liberation::DEFAULT_NODES)]
    pub nodes: usize,
    /// Highest moment in the cross-check against the moment hierarchy.
    #[arg(long, default_value_t = 8)]
    pub kmax: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct JacobiArgs {
    #[arg(long)]
    pub t: f64,
    #[arg(long = "trP", alias = "trp", alias = "tr-p", default_value_t = 0.5)]
    pub tr_p: f64,
    #[arg(long = "trQ", alias = "trq", alias = "tr-q", default_value_t = 0.5)]
    pub tr_q: f64,
    /// Initial law as JSON; traces default to those of the projections.
    #[arg(long, default_value = r#"{"tag":"classical"}"#)]
    pub init: String,
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    #[arg(long, default_value_t = freejacobi_core::liberation::DEFAULT_NODES)]
    pub nodes: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StationaryArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    #[arg(long, default_value_t = freejacobi_core::liberation::DEFAULT_NODES)]
    pub nodes: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value = r#"{"tag":"classical"}"#)]
    pub init: String,
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// One of closed-forms, fubm, moments, structure, jacobi, stationary, mc, all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub d: usize,
    #[arg(long, default_value_t = 20)]
    pub replicas: usize,
    #[command(flatten)]
    pub out: OutArgs,
}
