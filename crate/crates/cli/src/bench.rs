use std::io::Write;
use std::path::Path;

use bayes_lasso::diagnostics::{diagnose, MIN_DRAWS};
use bayes_lasso::gibbs::run_chains;

use crate::args::BenchArgs;
use crate::error::{CliError, CliResult};
use crate::fit::{execution, gibbs_config, prepare, priors, sampler};
use crate::output::resolve_out_dir;

pub const HEADER: [&str; 9] = [
    "Dataset",
    "Method",
    "β Mix %",
    "β Eff",
    "σ² Mix %",
    "σ² Eff",
    "λ² Mix %",
    "λ² Eff",
    "Time(s)",
];

/// ESS below this is flagged as too small to trust.
const LOW_ESS: f64 = 100.0;

fn na() -> String {
    "NA".into()
}

fn cell(v: f64, decimals: usize) -> String {
    if v.is_finite() {
        format!("{v:.decimals$}")
    } else {
        na()
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// One table row; failures become NA cells instead of aborting.
fn bench_row(args: &BenchArgs, path: &Path, prepared: Option<&bayes_lasso::gibbs::RegressionData>, which: crate::args::SamplerArg) -> Vec<String> {
    let s = sampler(which);
    let mut row = vec![dataset_name(path), s.name().to_string()];
    let Some(data) = prepared else {
        row.extend(std::iter::repeat_with(na).take(7));
        return row;
    };
    let chains = match run_chains(
        data,
        &priors(&args.chain),
        &gibbs_config(&args.chain),
        s,
        args.chain.chains,
        execution(&args.chain),
    ) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("warning: {} on {}: {e}", s.name(), row[0]);
            row.extend(std::iter::repeat_with(na).take(7));
            return row;
        }
    };
    let seconds = chains.iter().map(|c| c.total_seconds).fold(0.0, f64::max);
    if args.chain.nsamples < MIN_DRAWS {
        eprintln!(
            "warning: {} on {}: {} draws per chain is too few for ESS",
            s.name(),
            row[0],
            args.chain.nsamples
        );
        row.extend(std::iter::repeat_with(na).take(6));
        row.push(crate::format::format_value(seconds, 3));
        return row;
    }
    match diagnose(&chains) {
        Ok(r) => {
            for (label, ess) in [("β", r.beta_ess), ("σ²", r.sigma2.ess), ("λ²", r.lambda2.ess)] {
                if ess < LOW_ESS {
                    eprintln!("warning: {} on {}: {label} ESS is only {ess:.1}", s.name(), row[0]);
                }
            }
            row.push(cell(r.beta_mix_percent, 1));
            row.push(cell(r.beta_efficiency, 1));
            row.push(cell(r.sigma2.mix_percent, 1));
            row.push(cell(r.sigma2.efficiency, 1));
            row.push(cell(r.lambda2.mix_percent, 1));
            row.push(cell(r.lambda2.efficiency, 1));
            row.push(crate::format::format_value(r.seconds, 3));
        }
        Err(e) => {
            eprintln!("warning: diagnostics for {} on {}: {e}", s.name(), row[0]);
            row.extend(std::iter::repeat_with(na).take(6));
            row.push(crate::format::format_value(seconds, 3));
        }
    }
    row
}

pub fn table(args: &BenchArgs) -> CliResult<Vec<Vec<String>>> {
    if args.samplers.is_empty() {
        return Err(CliError::Usage("at least one sampler is required".into()));
    }
    let mut rows = Vec::new();
    for path in &args.data {
        let prepared = match prepare(path, &args.data_opts) {
            Ok((p, _)) => Some(p),
            Err(e) => {
                eprintln!("warning: {}: {e}", path.display());
                None
            }
        };
        for &which in &args.samplers {
            rows.push(bench_row(args, path, prepared.as_ref().map(|p| &p.data), which));
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 cells"))
}

pub fn to_text(rows: &[Vec<String>]) -> String {
    let width = |j: usize| {
        rows.iter()
            .map(|r| r[j].chars().count())
            .chain([HEADER[j].chars().count()])
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..HEADER.len()).map(width).collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let pad = widths[j] - c.chars().count();
                if j < 2 {
                    format!("{c}{}", " ".repeat(pad))
                } else {
                    format!("{}{c}", " ".repeat(pad))
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(HEADER.to_vec());
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

pub fn run<W: Write>(args: &BenchArgs, out: &mut W) -> CliResult<()> {
    let rows = table(args)?;
    let dir = resolve_out_dir(args.out.as_deref());
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let text = to_text(&rows);
    std::fs::write(dir.join("benchmark.csv"), to_csv(&rows)?)?;
    std::fs::write(dir.join("benchmark.txt"), &text)?;
    write!(out, "{text}")?;
    Ok(())
}
