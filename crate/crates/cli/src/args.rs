use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jpurn_core::rng::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(
    name = "jpurn",
    version,
    about = "Jacobi-Pineiro Markov chain: LU factors, urn simulation and checks",
    after_help = "Exit codes: 0 success, 1 runtime failure, 2 invalid parameters, 3 verification failure.\n\
                  The default seed is 0x4A50 (19024)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient table: x, y, t, r, s of the factors and a, b, c, d of P
    Coeffs(CoeffsArgs),
    /// Check P = P_L * P_U and the coefficient invariants
    Verify(VerifyArgs),
    /// Run the urn experiments
    Simulate(SimulateArgs),
    /// Compare empirical urn-step laws with the exact rows
    Compare(CompareArgs),
    /// Evaluate the polynomials q_0(x)..q_n(x) of the recursion
    Poly(PolyArgs),
    /// Transition diagram in Graphviz DOT
    Graph(GraphArgs),
}

/// Either `--alpha --beta --gamma` or `--M --N --gamma`.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Real for the general chain, non-negative integer with --M/--N
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// alpha = 1/M
    #[arg(long = "M", value_name = "M")]
    pub big_m: Option<u64>,
    /// beta = 1/N
    #[arg(long = "N", value_name = "N")]
    pub big_n: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Dot,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to PATH instead of stdout
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for trial-level parallelism; output does not depend on it
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long = "n-max", default_value_t = 10)]
    pub n_max: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Truncation size
    #[arg(long = "T", value_name = "T", default_value_t = 100)]
    pub size: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Composite,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "composite")]
    pub experiment: ExperimentArg,
    #[arg(long, default_value_t = 0)]
    pub initial: usize,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Emit end-state counts instead of full trajectories
    #[arg(long)]
    pub counts: bool,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "composite")]
    pub experiment: ExperimentArg,
    /// Start states to simulate
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 3, 4, 5])]
    pub initial: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Read counts written by `simulate --counts --steps 1` instead of simulating
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Evaluation points: integers, p/q, or decimals
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x: Vec<String>,
    #[arg(long = "n-max", default_value_t = 10)]
    pub n_max: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "P")]
    P,
    #[value(name = "PL")]
    Pl,
    #[value(name = "PU")]
    Pu,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "P")]
    pub which: Which,
    #[arg(long = "T", value_name = "T", default_value_t = 6)]
    pub size: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
