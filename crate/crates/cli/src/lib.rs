//! Command-line front end: distribution utilities, model fitting and sampler
//! benchmarks.

pub mod args;
pub mod bench;
pub mod dist;
pub mod error;
pub mod fit;
pub mod format;
pub mod output;

use std::io::Write;

use bayes_lasso::data::{synth_regression, write_csv, Design};

use args::{Cli, Command, SynthArgs};
use error::CliResult;

fn synth(args: &SynthArgs) -> CliResult<()> {
    let design = if args.rho == 0.0 {
        Design::IidNormal
    } else {
        Design::Correlated(args.rho)
    };
    let d = synth_regression(args.n, &args.beta, args.sigma, design, args.seed)?;
    write_csv(&d, std::fs::File::create(&args.out)?)?;
    Ok(())
}

/// Runs a parsed command; `argv` is echoed into run manifests.
pub fn run<W: Write>(cli: &Cli, argv: &[String], out: &mut W) -> CliResult<()> {
    match &cli.command {
        Command::Dist { op } => dist::run(op, out),
        Command::Fit(a) => fit::run(a, argv, out),
        Command::Benchmark(a) => bench::run(a, out),
        Command::Synth(a) => synth(a),
    }
}
