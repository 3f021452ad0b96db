use std::io::Write;
use std::process::ExitCode;

use bayes_lasso_cli::args::{Cli, Command};
use clap::Parser;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let verbose = match &cli.command {
        Command::Fit(a) => a.chain.verbose,
        Command::Benchmark(a) => a.chain.verbose,
        _ => false,
    };
    env_logger::Builder::new()
        .filter_level(if verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .parse_env("BLASSO_LOG")
        .init();

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = bayes_lasso_cli::run(&cli, &argv, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
