use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orss_core::Algorithm;

#[derive(Debug, Parser)]
#[command(
    name = "orss",
    version,
    about = "Online row sampling for tall matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a row file from a named generator.
    Generate(GenerateArgs),
    /// Stream a row file through a sampler and write the kept rows.
    Sample(SampleArgs),
    /// Check kept rows against the full input and print the certificate.
    Verify(VerifyArgs),
    /// Run repeated sampling trials and print CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Gaussian,
    Cliques,
    Permute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Online,
    Slim,
    Bss,
    Offline,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Online => Algorithm::Online,
            AlgoArg::Slim => Algorithm::Slim,
            AlgoArg::Bss => Algorithm::Bss,
            AlgoArg::Offline => Algorithm::Offline,
        }
    }
}

#[derive(Debug, Args)]
pub struct Accuracy {
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long = "gen", value_enum)]
    pub generator: Generator,
    /// Number of rows (gaussian).
    #[arg(long)]
    pub n: Option<usize>,
    /// Row dimension (gaussian) or vertex count (cliques).
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of clique copies.
    #[arg(long = "N")]
    pub copies: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Source file (permute).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Accuracy used to pick the clique base weight δ/(dε).
    #[command(flatten)]
    pub accuracy: Accuracy,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[command(flatten)]
    pub accuracy: Accuracy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Kept rows with weights; omitted means counters only.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Score rows in blocks of this size (online only).
    #[arg(long)]
    pub batch: Option<usize>,
    /// Sketch rows for block scoring; defaults to d (exact).
    #[arg(long)]
    pub sketch_dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Full input matrix.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Kept-row file written by `sample`.
    #[arg(long)]
    pub kept: PathBuf,
    #[command(flatten)]
    pub accuracy: Accuracy,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[command(flatten)]
    pub accuracy: Accuracy,
    /// First seed; trials use consecutive seeds.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long = "in")]
    pub input: PathBuf,
}
