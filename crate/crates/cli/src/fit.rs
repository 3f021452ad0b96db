use std::io::Write;
use std::path::Path;

use bayes_lasso::data::{load_csv, standardize, InteractionRule, ResponseColumn, Standardized};
use bayes_lasso::diagnostics::{diagnose, DiagnosticsReport, MIN_DRAWS};
use bayes_lasso::gibbs::{run_chains, ChainOutput, GibbsConfig, PriorHyperparams, Sampler};
use bayes_lasso::par::Execution;
use log::warn;
use serde_json::json;

use crate::args::{ChainArgs, DataArgs, DrawFormat, FitArgs, Interactions, SamplerArg};
use crate::error::{CliError, CliResult};
use crate::format::format_values;
use crate::output::{
    draw_columns, resolve_out_dir, sha256_hex, unix_seconds, write_draws_bin, write_draws_csv, write_json,
};

pub fn sampler(arg: SamplerArg) -> Sampler {
    match arg {
        SamplerArg::Hans => Sampler::Hans,
        SamplerArg::Pc => Sampler::Pc,
    }
}

fn rule(arg: Interactions) -> InteractionRule {
    match arg {
        Interactions::None => InteractionRule::None,
        Interactions::Pairs => InteractionRule::Pairs,
        Interactions::PairsSquares => InteractionRule::PairsAndSquares,
    }
}

pub fn interactions_name(arg: Interactions) -> &'static str {
    match arg {
        Interactions::None => "none",
        Interactions::Pairs => "pairs",
        Interactions::PairsSquares => "pairs+squares",
    }
}

/// Reads and standardizes a dataset; also returns the raw file bytes' hash.
pub fn prepare(path: &Path, opts: &DataArgs) -> CliResult<(Standardized, String)> {
    if !opts.delimiter.is_ascii() {
        return Err(CliError::Usage(format!("delimiter '{}' is not ASCII", opts.delimiter)));
    }
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let response = match &opts.response {
        Some(r) => r.parse::<ResponseColumn>().expect("infallible"),
        None => ResponseColumn::Last,
    };
    let dataset = load_csv(path, &response, opts.delimiter as u8)?;
    if dataset.dropped_rows > 0 {
        eprintln!("warning: dropped {} row(s) with missing values", dataset.dropped_rows);
    }
    let prepared = standardize(&dataset, rule(opts.interactions))?;
    if !prepared.dropped_columns.is_empty() {
        eprintln!("warning: dropped constant column(s): {}", prepared.dropped_columns.join(", "));
    }
    Ok((prepared, sha256_hex(&bytes)))
}

pub fn priors(args: &ChainArgs) -> PriorHyperparams {
    PriorHyperparams {
        a_tilde: args.a1,
        b_tilde: args.b1,
        u: args.u1,
        v: args.v1,
    }
}

pub fn gibbs_config(args: &ChainArgs) -> GibbsConfig {
    GibbsConfig {
        n_samples: args.nsamples,
        n_burnin: args.burnin,
        seed: args.seed,
        sigma2_init: args.sigma2_init,
        lambda2_init: args.lambda2_init,
        beta_init: args.beta_init.clone(),
        verbose: args.verbose,
        ..GibbsConfig::default()
    }
}

pub fn execution(args: &ChainArgs) -> Execution {
    if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

/// Everything that determines the draws.
fn config_json(args: &FitArgs, data_hash: &str) -> serde_json::Value {
    let c = &args.chain;
    json!({
        "data_sha256": data_hash,
        "response": args.data_opts.response,
        "delimiter": args.data_opts.delimiter.to_string(),
        "interactions": interactions_name(args.data_opts.interactions),
        "sampler": sampler(args.sampler).name(),
        "a1": c.a1, "b1": c.b1, "u1": c.u1, "v1": c.v1,
        "nsamples": c.nsamples,
        "burnin": c.burnin,
        "seed": c.seed,
        "sigma2_init": c.sigma2_init,
        "lambda2_init": c.lambda2_init,
        "beta_init": c.beta_init,
        "chains": c.chains,
    })
}

fn report_json(report: &DiagnosticsReport) -> serde_json::Value {
    serde_json::to_value(report).expect("report serializes")
}

pub fn run<W: Write>(args: &FitArgs, argv: &[String], out: &mut W) -> CliResult<()> {
    let started = unix_seconds();
    let dir = resolve_out_dir(args.out.as_deref());
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;

    let (prepared, data_hash) = prepare(&args.data, &args.data_opts)?;
    let config = config_json(args, &data_hash);
    let config_hash = sha256_hex(config.to_string().as_bytes());
    let manifest = |status: &str, partial: bool, files: &[String], error: Option<String>| {
        json!({
            "command": argv,
            "seed": args.chain.seed,
            "config_hash": config_hash,
            "config": config,
            "versions": { "blasso": env!("CARGO_PKG_VERSION") },
            "started_unix": started,
            "finished_unix": unix_seconds(),
            "status": status,
            "partial": partial,
            "files": files,
            "error": error,
        })
    };

    let sampler = sampler(args.sampler);
    let chains = match run_chains(
        &prepared.data,
        &priors(&args.chain),
        &gibbs_config(&args.chain),
        sampler,
        args.chain.chains,
        execution(&args.chain),
    ) {
        Ok(c) => c,
        Err(e) => {
            let err = CliError::from(e);
            let partial = matches!(err, CliError::Numerical(_));
            write_json(&dir.join("manifest.json"), &manifest("failed", partial, &[], Some(err.to_string())))?;
            return Err(err);
        }
    };

    let columns = draw_columns(&prepared.column_names);
    let mut files = Vec::new();
    for (k, chain) in chains.iter().enumerate() {
        let name = match args.format {
            DrawFormat::Csv => format!("draws_chain{}.csv", k + 1),
            DrawFormat::Bin => format!("draws_chain{}.bin", k + 1),
        };
        let path = dir.join(&name);
        match args.format {
            DrawFormat::Csv => write_draws_csv(&path, chain, &columns)?,
            DrawFormat::Bin => write_draws_bin(&path, chain, &columns)?,
        }
        files.push(name);
    }

    let report = if args.chain.nsamples >= MIN_DRAWS {
        Some(diagnose(&chains)?)
    } else {
        warn!("fewer than {MIN_DRAWS} draws per chain; diagnostics skipped");
        eprintln!("warning: fewer than {MIN_DRAWS} draws per chain; diagnostics skipped");
        None
    };
    let diagnostics = json!({
        "sampler": sampler.name(),
        "columns": columns,
        "standardization": {
            "y_mean": prepared.y_mean,
            "x_means": prepared.x_means,
            "x_sds": prepared.x_sds,
            "dropped_columns": prepared.dropped_columns,
        },
        "chain_seconds": chains.iter().map(|c| json!({
            "total": c.total_seconds,
            "sampling": c.sampling_seconds,
        })).collect::<Vec<_>>(),
        "report": report.as_ref().map(report_json),
    });
    write_json(&dir.join("diagnostics.json"), &diagnostics)?;
    files.push("diagnostics.json".into());
    write_json(&dir.join("manifest.json"), &manifest("ok", false, &files, None))?;

    print_summary(out, &chains, report.as_ref(), &dir)?;
    Ok(())
}

fn print_summary<W: Write>(
    out: &mut W,
    chains: &[ChainOutput],
    report: Option<&DiagnosticsReport>,
    dir: &Path,
) -> CliResult<()> {
    let n = chains.first().map(ChainOutput::n_samples).unwrap_or(0);
    writeln!(out, "{} sampler: {} chain(s) x {} draws -> {}", chains[0].sampler.name(), chains.len(), n, dir.display())?;
    let Some(report) = report else {
        return Ok(());
    };
    let rows: Vec<_> = report.beta.iter().chain([&report.sigma2, &report.lambda2]).collect();
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(9);
    let col = |vals: Vec<f64>, digits| format_values(&vals, digits);
    let means = col(rows.iter().map(|r| r.mean).collect(), 4);
    let sds = col(rows.iter().map(|r| r.sd).collect(), 4);
    let ess: Vec<String> = rows.iter().map(|r| format!("{:.0}", r.ess)).collect();
    let rhat: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.r_hat)).collect();
    writeln!(out, "{:<width$} {:>12} {:>12} {:>8} {:>7}", "parameter", "mean", "sd", "ESS", "R-hat")?;
    for i in 0..rows.len() {
        writeln!(
            out,
            "{:<width$} {:>12} {:>12} {:>8} {:>7}",
            rows[i].name, means[i], sds[i], ess[i], rhat[i]
        )?;
    }
    Ok(())
}
