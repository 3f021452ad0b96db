use std::io::Write;

use bayes_lasso::distribution::Lasso;
use bayes_lasso::par::{eval_grid, linspace, sample_lasso, Execution};

use crate::args::{DistOp, LassoArgs, PointArgs};
use crate::error::{CliError, CliResult};
use crate::format::format_values;

fn lasso(p: &LassoArgs) -> CliResult<Lasso> {
    Ok(Lasso::new(p.a, p.b, p.c)?)
}

pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("grid must look like lo:hi:n, got '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi && n >= 2) {
        return Err(CliError::Usage(format!("grid needs finite lo < hi and n >= 2, got '{spec}'")));
    }
    Ok(linspace(lo, hi, n))
}

fn pointwise<W: Write>(
    args: &PointArgs,
    column: &str,
    f: impl Fn(&Lasso, f64) -> bayes_lasso::Result<f64> + Sync + Send,
    out: &mut W,
) -> CliResult<()> {
    let dist = lasso(&args.params)?;
    let digits = args.params.digits;
    let eval = |x: f64| f(&dist, x).expect("parameters validated above");
    match &args.grid {
        Some(spec) => {
            let xs = parse_grid(spec)?;
            let ys = eval_grid(&xs, Execution::Parallel, eval);
            let xs_txt = format_values(&xs, digits);
            let ys_txt = format_values(&ys, digits);
            writeln!(out, "x,{column}")?;
            for (x, y) in xs_txt.iter().zip(&ys_txt) {
                writeln!(out, "{},{}", x.trim(), y.trim())?;
            }
        }
        None => {
            let ys: Vec<f64> = args.x.iter().map(|&x| eval(x)).collect();
            writeln!(out, "{}", format_values(&ys, digits).join(","))?;
        }
    }
    Ok(())
}

pub fn run<W: Write>(op: &DistOp, out: &mut W) -> CliResult<()> {
    match op {
        DistOp::Pdf(args) if args.log => pointwise(args, "log_pdf", |d, x| d.ln_pdf(x), out),
        DistOp::Pdf(args) => pointwise(args, "pdf", |d, x| d.pdf(x), out),
        DistOp::Cdf(args) if args.log => pointwise(args, "log_cdf", |d, x| d.ln_cdf(x), out),
        DistOp::Cdf(args) => pointwise(args, "cdf", |d, x| d.cdf(x), out),
        DistOp::Quantile { params, p } => {
            let dist = lasso(params)?;
            let q = p
                .iter()
                .map(|&u| dist.quantile(u))
                .collect::<bayes_lasso::Result<Vec<f64>>>()?;
            writeln!(out, "{}", format_values(&q, params.digits).join(","))?;
            Ok(())
        }
        DistOp::Sample { params, n, seed } => {
            let dist = lasso(params)?;
            let draws = sample_lasso(&dist, *n, *seed, Execution::Parallel);
            // draws are independent; each gets its own layout
            for x in draws {
                writeln!(out, "{}", format_values(&[x], params.digits)[0])?;
            }
            Ok(())
        }
        DistOp::Moments { params } => {
            let dist = lasso(params)?;
            let m = dist.moments(4)?;
            let txt = format_values(&m, params.digits);
            writeln!(out, "r,moment")?;
            for (r, v) in txt.iter().enumerate() {
                writeln!(out, "{},{}", r + 1, v.trim())?;
            }
            Ok(())
        }
        DistOp::Mode { params } => {
            let dist = lasso(params)?;
            writeln!(out, "{}", format_values(&[dist.mode()], params.digits)[0])?;
            Ok(())
        }
    }
}
