use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qframe",
    version,
    about = "q-deformed entropy, complexity and divergence"
)]
pub struct Cli {
    /// Worker threads for sweep rows and verification cases.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,

    /// Write a JSON run report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one quantity at one q.
    Compute(ComputeArgs),
    /// Evaluate all quantities on a uniform q grid and print CSV.
    Sweep(SweepArgs),
    /// Run the seeded verification suites.
    Verify(VerifyArgs),
    /// Minimise the complexity over beliefs.
    Minimize(MinimizeArgs),
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Truth distribution (JSON or CSV).
    #[arg(long, value_name = "FILE")]
    pub x: PathBuf,

    /// Renormalise weights that do not sum to one.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Entropy,
    Complexity,
    Divergence,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Entropy => "entropy",
            Quantity::Complexity => "complexity",
            Quantity::Divergence => "divergence",
        }
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub inputs: Inputs,

    /// Belief distribution; required for complexity and divergence.
    #[arg(long, value_name = "FILE")]
    pub y: Option<PathBuf>,

    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,

    #[arg(long, value_enum, default_value_t = Quantity::Entropy)]
    pub quantity: Quantity,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub inputs: Inputs,

    #[arg(long, value_name = "FILE")]
    pub y: Option<PathBuf>,

    #[arg(long, allow_negative_numbers = true)]
    pub q_min: f64,

    #[arg(long, allow_negative_numbers = true)]
    pub q_max: f64,

    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 11, allow_negative_numbers = true)]
    pub steps: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Consistency,
    Quantities,
    Variational,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Largest alphabet size for random cases (2 to 16).
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Uniform,
    Random,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub inputs: Inputs,

    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,

    /// Accepted gap between the minimum and the entropy.
    #[arg(long, default_value_t = 1e-9, allow_negative_numbers = true)]
    pub tolerance: f64,

    /// Stop when the projected-gradient step is this small.
    #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
    pub step_tolerance: f64,

    #[arg(long, default_value_t = 100_000)]
    pub max_iterations: usize,

    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    pub init: InitArg,

    /// Seed for `--init random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write the minimizer as a JSON distribution.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
