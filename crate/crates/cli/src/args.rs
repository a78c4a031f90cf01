use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Condense and densify integer sets while preserving the solution
/// structure of a polynomial system.
///
/// Every report starts with `# config {json}` and ends with one
/// `RESULT key=value …` line. Exit codes: 0 success, 1 verified negative,
/// 2 budget exceeded, 3 input error, 4 internal verification failure.
#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "freiman", version)]
pub struct RunConfig {
    /// Largest number of tuples any single enumeration may visit.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub budget: u64,

    /// Omit the wall-clock line so that reports are byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timing: bool,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Shrink the enveloping radius by iterated modular condensation.
    Condense(CondenseArgs),
    /// Densify a set with the product-of-primes map.
    Densify(DensifyArgs),
    /// Count the mean value J_{s,k}(A) or J_{s,k}(A; φ).
    Count(CountArgs),
    /// Decide whether a map is a Freiman isomorphism (or a t-fold one).
    Verify(VerifyArgs),
    /// Exact minimal enveloping radius by exhaustive search.
    Minmodel(MinmodelArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CondenseArgs {
    /// thm31, thm32 or greedy; defaults to thm32, or greedy with --diagonal.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub max_steps: usize,
    /// Stop once env is at most this value.
    #[arg(long)]
    pub target_env: Option<String>,
    /// Largest modulus tried by the greedy mode.
    #[arg(long, default_value_t = 10_000)]
    pub h_cap: u64,
    /// Run the diagonal pipeline for a system of the form Σ c_j x_j^t.
    #[arg(long, value_name = "T")]
    pub diagonal: Option<u32>,
    pub set: PathBuf,
    pub system: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensifyArgs {
    /// Rational in (0, 1/8), such as 1/10.
    #[arg(long, default_value = "1/10")]
    pub epsilon: String,
    #[arg(long, default_value_t = 1)]
    pub max_steps: usize,
    /// full, count or sample; defaults to full for card ≤ 3, sample above.
    #[arg(long)]
    pub verify: Option<String>,
    #[arg(long, default_value_t = 2000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run exactly one step, skipping the continuation test.
    #[arg(long)]
    pub single: bool,
    pub set: PathBuf,
    pub system: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub s: usize,
    /// Degree of the Vinogradov system; ignored with --phi.
    #[arg(long, required_unless_present = "phi")]
    pub k: Option<u32>,
    /// System file with `vars 1` listing φ_1, …, φ_k.
    #[arg(long)]
    pub phi: Option<PathBuf>,
    /// Enumerate all 2s-tuples instead of tallying moment vectors.
    #[arg(long)]
    pub oracle: bool,
    /// Exponent used in the reported main-term shape.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    pub set: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    pub set: PathBuf,
    pub system: PathBuf,
    pub map: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MinmodelArgs {
    /// Largest enveloping radius searched.
    #[arg(long, default_value_t = 64)]
    pub env_cap: u64,
    pub set: PathBuf,
    pub system: PathBuf,
}
