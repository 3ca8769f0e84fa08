use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minimax_resolution::bounds::{DEFAULT_DOMAIN_SIGMAS, DEFAULT_GRID_POINTS};
use minimax_resolution::estimators::EstimatorKind;
use minimax_resolution::simulate::{DEFAULT_THETA_POINTS, DEFAULT_THETA_SIGMAS, DEFAULT_TRIALS};
use serde::{Deserialize, Serialize};

/// Worst-case resolution limits for two incoherent point sources.
#[derive(Debug, Parser)]
#[command(name = "reslim", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fisher information of direct imaging and SPADE against separation.
    Fisher(FisherArgs),
    /// Minimax lower bounds: closed forms and the eigensolver bound.
    Bounds(BoundsArgs),
    /// Monte Carlo risk curves of the estimators.
    Simulate(SimulateArgs),
    /// Worst-case risk against photon number with log-log slopes.
    Scaling(ScalingArgs),
    /// Exact SPADE risk by Poisson summation.
    MseExact(MseExactArgs),
    /// Run the built-in invariant checks.
    Verify(VerifyArgs),
    /// Rerun a command from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FisherArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100)]
    pub photons: u64,
    /// Largest separation; defaults to 10σ.
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub theta_points: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100)]
    pub photons: u64,
    /// Eigenproblem domain `[0, a]`; defaults to 10σ.
    #[arg(long)]
    pub domain: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100)]
    pub photons: u64,
    /// Largest separation; defaults to 6σ.
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_THETA_POINTS)]
    pub theta_points: usize,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated: spade-ml, spade-modified-ml, direct-ml.
    #[arg(long, value_delimiter = ',', default_values_t = EstimatorKind::ALL)]
    pub estimators: Vec<EstimatorKind>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScalingArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Comma-separated, strictly increasing, at least three values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub photons: Vec<u64>,
    /// Overrides the per-estimator grid size.
    #[arg(long)]
    pub theta_points: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = EstimatorKind::ALL)]
    pub estimators: Vec<EstimatorKind>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MseExactArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100)]
    pub photons: u64,
    /// Largest separation; defaults to 6σ.
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_THETA_POINTS)]
    pub theta_points: usize,
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = [EstimatorKind::SpadeMl, EstimatorKind::SpadeModifiedMl]
    )]
    pub estimators: Vec<EstimatorKind>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Where to write the regenerated output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl FisherArgs {
    pub fn resolve(mut self) -> Self {
        self.theta_max.get_or_insert(10.0 * self.sigma);
        self
    }
}

impl BoundsArgs {
    pub fn resolve(mut self) -> Self {
        self.domain.get_or_insert(DEFAULT_DOMAIN_SIGMAS * self.sigma);
        self
    }
}

impl SimulateArgs {
    pub fn resolve(mut self) -> Self {
        self.theta_max.get_or_insert(DEFAULT_THETA_SIGMAS * self.sigma);
        self
    }
}

impl MseExactArgs {
    pub fn resolve(mut self) -> Self {
        self.theta_max.get_or_insert(DEFAULT_THETA_SIGMAS * self.sigma);
        self
    }
}
