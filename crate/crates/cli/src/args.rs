use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "blasso", version, about = "Lasso distribution utilities and Bayesian Lasso samplers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density, CDF, quantiles, draws and moments of the Lasso distribution.
    Dist {
        #[command(subcommand)]
        op: DistOp,
    },
    /// Fit a Bayesian Lasso regression to a CSV file.
    Fit(FitArgs),
    /// Compare samplers on one or more datasets.
    Benchmark(BenchArgs),
    /// Write a synthetic regression dataset as CSV.
    Synth(SynthArgs),
}

#[derive(Debug, Args, Clone, Copy)]
pub struct LassoArgs {
    #[arg(short = 'a', allow_hyphen_values = true)]
    pub a: f64,
    #[arg(short = 'b', allow_hyphen_values = true)]
    pub b: f64,
    #[arg(short = 'c', allow_hyphen_values = true)]
    pub c: f64,
    /// Significant digits in printed values.
    #[arg(long, default_value_t = 7)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub params: LassoArgs,
    /// Comma-separated evaluation points.
    #[arg(short = 'x', allow_hyphen_values = true, value_delimiter = ',', required_unless_present = "grid")]
    pub x: Vec<f64>,
    /// Evenly spaced grid `lo:hi:n`; prints a two-column CSV.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x")]
    pub grid: Option<String>,
    /// Natural log of the result.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Subcommand)]
pub enum DistOp {
    Pdf(PointArgs),
    Cdf(PointArgs),
    Quantile {
        #[command(flatten)]
        params: LassoArgs,
        /// Comma-separated probabilities.
        #[arg(short = 'p', value_delimiter = ',', required = true)]
        p: Vec<f64>,
    },
    Sample {
        #[command(flatten)]
        params: LassoArgs,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Raw moments of order 1 to 4.
    Moments {
        #[command(flatten)]
        params: LassoArgs,
    },
    Mode {
        #[command(flatten)]
        params: LassoArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Hans,
    Pc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DrawFormat {
    Csv,
    Bin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Interactions {
    None,
    Pairs,
    #[value(name = "pairs+squares")]
    PairsSquares,
}

#[derive(Debug, Args, Clone)]
pub struct DataArgs {
    /// Response column: a header name or a zero-based index. Defaults to the
    /// last column.
    #[arg(long)]
    pub response: Option<String>,
    #[arg(long, default_value = ",")]
    pub delimiter: char,
    /// Add products of the predictors before standardizing.
    #[arg(long, value_enum, default_value_t = Interactions::None)]
    pub interactions: Interactions,
}

#[derive(Debug, Args, Clone)]
pub struct ChainArgs {
    #[arg(long = "a1", default_value_t = 0.01)]
    pub a1: f64,
    #[arg(long = "b1", default_value_t = 0.01)]
    pub b1: f64,
    #[arg(long = "u1", default_value_t = 0.01)]
    pub u1: f64,
    #[arg(long = "v1", default_value_t = 0.01)]
    pub v1: f64,
    #[arg(long, default_value_t = 5000)]
    pub nsamples: usize,
    #[arg(long, default_value_t = 1000)]
    pub burnin: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long = "sigma2-init", default_value_t = 1.0)]
    pub sigma2_init: f64,
    #[arg(long = "lambda2-init", default_value_t = 1.0)]
    pub lambda2_init: f64,
    /// Comma-separated starting coefficients (standardized scale).
    #[arg(long = "beta-init", allow_hyphen_values = true, value_delimiter = ',')]
    pub beta_init: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    /// Run chains one after another instead of on a thread pool.
    #[arg(long)]
    pub sequential: bool,
    /// Progress every 1000 iterations.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = SamplerArg::Hans)]
    pub sampler: SamplerArg,
    #[command(flatten)]
    pub data_opts: DataArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value_t = DrawFormat::Csv)]
    pub format: DrawFormat,
    /// Output directory; defaults to $BLASSO_OUT_DIR, then `blasso-out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset CSV files; repeat for several.
    #[arg(long = "data", required = true)]
    pub data: Vec<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SamplerArg::Hans, SamplerArg::Pc])]
    pub samplers: Vec<SamplerArg>,
    #[command(flatten)]
    pub data_opts: DataArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Output directory for benchmark.csv and benchmark.txt; defaults to
    /// $BLASSO_OUT_DIR, then `blasso-out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(short = 'n', long = "rows")]
    pub n: usize,
    /// Comma-separated true coefficients.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Correlation ρ between neighbouring predictors (`ρ^|j-k|` overall).
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}
