//! Command-line surface and the resolved, serialisable run configuration.
//!
//! Every flag can also be given through an environment variable with the
//! `PRIVDIST_` prefix (for example `PRIVDIST_SEED`, `PRIVDIST_TOL_PSD`).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use privdist_core::{OptimizerOptions, Tolerances};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "privdist",
    version,
    about = "Distill entanglement from private quantum states"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct GlobalArgs {
    /// Master seed for every random choice.
    #[arg(long, global = true, env = "PRIVDIST_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Positivity tolerance for density matrices.
    #[arg(long, global = true, env = "PRIVDIST_TOL_PSD", default_value_t = 1e-10)]
    pub tol_psd: f64,
    /// Hermiticity tolerance for density matrices.
    #[arg(
        long,
        global = true,
        env = "PRIVDIST_TOL_HERM",
        default_value_t = 1e-12
    )]
    pub tol_herm: f64,
    /// Trace tolerance for density matrices.
    #[arg(
        long,
        global = true,
        env = "PRIVDIST_TOL_TRACE",
        default_value_t = 1e-10
    )]
    pub tol_trace: f64,
    /// Per-sweep gain below which the optimiser stops.
    #[arg(
        long,
        global = true,
        env = "PRIVDIST_TOL_CONV",
        default_value_t = 1e-12
    )]
    pub tol_conv: f64,
    /// Residual threshold reported alongside filtering outcomes.
    #[arg(
        long,
        global = true,
        env = "PRIVDIST_TOL_RESIDUAL",
        default_value_t = 1e-9
    )]
    pub tol_residual: f64,
    /// Random restarts of the overlap optimiser.
    #[arg(long, global = true, env = "PRIVDIST_RESTARTS", default_value_t = 32)]
    pub restarts: usize,
    /// Sweep limit per optimiser restart.
    #[arg(long, global = true, env = "PRIVDIST_MAX_ITERS", default_value_t = 200)]
    pub max_iters: usize,
    /// Output file, or an existing directory to write `<command>.json` into.
    /// Standard output when absent.
    #[arg(long, global = true, env = "PRIVDIST_OUT")]
    pub out: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            herm: self.tol_herm,
            psd: self.tol_psd,
            trace: self.tol_trace,
            residual: self.tol_residual,
        }
    }

    pub fn optimizer(&self) -> OptimizerOptions {
        OptimizerOptions {
            restarts: self.restarts,
            max_iters: self.max_iters,
            conv_tol: self.tol_conv,
            seed: self.seed,
            ..OptimizerOptions::default()
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Command {
    /// Generate a random unitary or density matrix.
    Gen(GenArgs),
    /// Assemble a private-state spec from random or supplied parts.
    Build(BuildArgs),
    /// Maximise the product overlap of one cross operator.
    Eta(PairArgs),
    /// Build the local filters and simulate the filtering branch.
    Distill(PairArgs),
    /// Distillable-entanglement lower bound over all key pairs.
    Bound(SpecArgs),
    /// Range-sampling certificate for the entanglement of formation.
    Certify(CertifyArgs),
    /// Vary one property of the shield and tabulate the bound.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Build(_) => "build",
            Command::Eta(_) => "eta",
            Command::Distill(_) => "distill",
            Command::Bound(_) => "bound",
            Command::Certify(_) => "certify",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Unitary,
    Density,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: MatrixKind,
    #[arg(long)]
    pub dim: usize,
    /// Rank of a generated density matrix (full rank by default).
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct BuildArgs {
    /// Key dimension.
    #[arg(long)]
    pub d: usize,
    /// Number of parties; a single shield dimension is then repeated.
    #[arg(long)]
    pub parties: Option<usize>,
    /// Shield factor dimension of every party, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub shield_dims: Vec<usize>,
    /// Rank of a randomly generated shield state.
    #[arg(long)]
    pub shield_rank: Option<usize>,
    /// Shield state as a matrix JSON file instead of a random one.
    #[arg(long)]
    pub shield_file: Option<PathBuf>,
    /// One unitary per key value as matrix JSON files, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub unitary_files: Vec<PathBuf>,
    /// Also write the assembled state as matrix JSON.
    #[arg(long)]
    pub state_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SpecArgs {
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct PairArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub i: usize,
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Every pair `i < j` instead of one.
    #[arg(long)]
    pub all_pairs: bool,
    /// Also run the brute-force oracle with this many samples.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct CertifyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Certify the m-th tensor power instead of the state itself.
    #[arg(long, default_value_t = 1)]
    pub tensor_power: usize,
    /// Largest total dimension a tensor power may reach.
    #[arg(long, default_value_t = privdist_core::private_state::DEFAULT_DIMENSION_CAP)]
    pub dim_cap: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    /// White-noise weight mixed into the shield.
    Depolarize,
    /// Rank of a random replacement shield.
    Rank,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SweepArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_enum)]
    pub knob: Knob,
    /// Knob values, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub values: Vec<f64>,
}

/// Everything a run depends on besides its input files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    #[serde(flatten)]
    pub global: GlobalArgs,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        Self {
            command: cli.command,
            global: cli.global,
        }
    }
}
