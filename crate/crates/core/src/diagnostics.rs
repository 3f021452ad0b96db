//! Convergence and efficiency summaries over several chains.
//!
//! ESS and R-hat follow the rank-normalized split-chain recipe: pool the
//! draws, replace them by normal scores of their average ranks, split every
//! chain in half, and estimate the multi-chain autocorrelation with Geyer's
//! initial monotone sequence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::ChainOutput;
use crate::special::norm_quantile;

/// Fewest draws per chain the estimators accept.
pub const MIN_DRAWS: usize = 8;

/// An estimate plus a flag for the zero-variance case, where the estimator
/// is undefined and a conventional value is returned instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub degenerate: bool,
}

fn check_chains(chains: &[Vec<f64>]) -> Result<usize> {
    let Some(first) = chains.first() else {
        return Err(Error::Config("at least one chain is required".into()));
    };
    let n = first.len();
    if chains.iter().any(|c| c.len() != n) {
        return Err(Error::Config("chains must all have the same length".into()));
    }
    if n < MIN_DRAWS {
        return Err(Error::Config(format!(
            "at least {MIN_DRAWS} draws per chain are required, got {n}"
        )));
    }
    if chains.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Config("draws must be finite".into()));
    }
    Ok(n)
}

fn is_constant(chains: &[Vec<f64>]) -> bool {
    let x0 = chains[0][0];
    chains.iter().flatten().all(|&x| x == x0)
}

/// Each chain cut into two halves; the middle draw of an odd-length chain
/// is dropped.
pub fn split_chains(chains: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * chains.len());
    for c in chains {
        let half = c.len() / 2;
        out.push(c[..half].to_vec());
        out.push(c[c.len() - half..].to_vec());
    }
    out
}

/// Normal scores `Φ⁻¹((r - 3/8) / (S + 1/4))` of the pooled average ranks.
pub fn rank_normalize(chains: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let total: usize = chains.iter().map(Vec::len).sum();
    let mut order: Vec<(f64, usize, usize)> = chains
        .iter()
        .enumerate()
        .flat_map(|(m, c)| c.iter().enumerate().map(move |(i, &x)| (x, m, i)))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out: Vec<Vec<f64>> = chains.iter().map(|c| vec![0.0; c.len()]).collect();
    let denom = total as f64 + 0.25;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && order[end].0 == order[start].0 {
            end += 1;
        }
        // ranks are 1-based; ties share their average
        let rank = 0.5 * ((start + 1) + end) as f64;
        let z = norm_quantile((rank - 0.375) / denom).expect("score lies strictly inside (0, 1)");
        for &(_, m, i) in &order[start..end] {
            out[m][i] = z;
        }
        start = end;
    }
    out
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sample_variance(x: &[f64], m: f64) -> f64 {
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

fn autocovariance(x: &[f64], m: f64, lag: usize) -> f64 {
    let n = x.len();
    let s: f64 = x[..n - lag]
        .iter()
        .zip(&x[lag..])
        .map(|(a, b)| (a - m) * (b - m))
        .sum();
    s / n as f64
}

/// Multi-chain ESS with Geyer's initial monotone sequence; autocovariances
/// are direct sums, computed only up to the truncation lag.
fn ess_raw(chains: &[Vec<f64>]) -> f64 {
    let m = chains.len();
    let n = chains[0].len();
    let total = (m * n) as f64;
    let means: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let vars: Vec<f64> = chains.iter().zip(&means).map(|(c, &mu)| sample_variance(c, mu)).collect();
    let w = mean(&vars);
    let b_over_n = if m > 1 { sample_variance(&means, mean(&means)) } else { 0.0 };
    let var_plus = (n as f64 - 1.0) / n as f64 * w + b_over_n;
    if !(var_plus > 0.0) {
        return total;
    }

    let rho = |lag: usize| -> f64 {
        let acov = chains
            .iter()
            .zip(&means)
            .map(|(c, &mu)| autocovariance(c, mu, lag))
            .sum::<f64>()
            / m as f64;
        1.0 - (w - acov) / var_plus
    };

    // initial positive sequence: keep pairs (ρ_{t+1}, ρ_{t+2}) while their
    // sum is positive
    let mut rhos = vec![1.0, rho(1)];
    let (mut even, mut odd) = (1.0, rhos[1]);
    let mut t = 1;
    while t + 3 < n && even + odd > 0.0 {
        even = rho(t + 1);
        odd = rho(t + 2);
        if even + odd >= 0.0 {
            rhos.push(even);
            rhos.push(odd);
        }
        t += 2;
    }
    let max_t = t.saturating_sub(2);
    rhos.truncate(max_t + 1);
    let tail = if even > 0.0 { even } else { 0.0 };

    // initial monotone sequence
    let mut t = 1;
    while t + 2 <= max_t {
        if rhos[t + 1] + rhos[t + 2] > rhos[t - 1] + rhos[t] {
            let v = 0.5 * (rhos[t - 1] + rhos[t]);
            rhos[t + 1] = v;
            rhos[t + 2] = v;
        }
        t += 2;
    }

    let tau = -1.0 + 2.0 * rhos.iter().sum::<f64>() + tail;
    // antithetic chains can push tau towards zero; cap as the reference does
    let tau = tau.max(1.0 / total.log10());
    total / tau
}

/// Rank-normalized split-chain bulk ESS of one scalar parameter.
///
/// A constant parameter returns `M·N` flagged as degenerate.
pub fn ess_bulk(chains: &[Vec<f64>]) -> Result<Estimate> {
    let n = check_chains(chains)?;
    if is_constant(chains) {
        return Ok(Estimate {
            value: (chains.len() * n) as f64,
            degenerate: true,
        });
    }
    let z = rank_normalize(&split_chains(chains));
    Ok(Estimate {
        value: ess_raw(&z),
        degenerate: false,
    })
}

fn r_hat_raw(chains: &[Vec<f64>]) -> f64 {
    let m = chains.len();
    let n = chains[0].len() as f64;
    let means: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let w = mean(&chains.iter().zip(&means).map(|(c, &mu)| sample_variance(c, mu)).collect::<Vec<_>>());
    let b_over_n = if m > 1 { sample_variance(&means, mean(&means)) } else { 0.0 };
    let var_plus = (n - 1.0) / n * w + b_over_n;
    if w > 0.0 {
        (var_plus / w).sqrt()
    } else {
        f64::INFINITY
    }
}

/// Rank-normalized split R-hat: the larger of the bulk value and the value
/// for the folded draws `|x - median|`. A constant parameter returns 1,
/// flagged as degenerate.
pub fn split_r_hat(chains: &[Vec<f64>]) -> Result<Estimate> {
    check_chains(chains)?;
    if is_constant(chains) {
        return Ok(Estimate {
            value: 1.0,
            degenerate: true,
        });
    }
    let split = split_chains(chains);
    let bulk = r_hat_raw(&rank_normalize(&split));

    let mut pooled: Vec<f64> = split.iter().flatten().copied().collect();
    pooled.sort_by(f64::total_cmp);
    let k = pooled.len();
    let median = if k % 2 == 1 {
        pooled[k / 2]
    } else {
        0.5 * (pooled[k / 2 - 1] + pooled[k / 2])
    };
    let folded: Vec<Vec<f64>> = split
        .iter()
        .map(|c| c.iter().map(|x| (x - median).abs()).collect())
        .collect();
    let tail = r_hat_raw(&rank_normalize(&folded));
    Ok(Estimate {
        value: bulk.max(tail),
        degenerate: false,
    })
}

/// Split R-hat on the raw draws, without rank normalization or folding.
pub fn split_r_hat_classic(chains: &[Vec<f64>]) -> Result<Estimate> {
    check_chains(chains)?;
    if is_constant(chains) {
        return Ok(Estimate {
            value: 1.0,
            degenerate: true,
        });
    }
    Ok(Estimate {
        value: r_hat_raw(&split_chains(chains)),
        degenerate: false,
    })
}

/// `100 · ESS / N`.
pub fn mix_percent(ess: f64, n_total: usize) -> Result<f64> {
    if n_total == 0 {
        return Err(Error::domain("n_total", 0.0, "at least 1"));
    }
    if !(ess >= 0.0 && ess.is_finite()) {
        return Err(Error::domain("ess", ess, "finite and non-negative"));
    }
    Ok(100.0 * ess / n_total as f64)
}

/// `ESS / seconds`.
pub fn efficiency(ess: f64, seconds: f64) -> Result<f64> {
    if !(seconds > 0.0 && seconds.is_finite()) {
        return Err(Error::domain("seconds", seconds, "finite and strictly positive"));
    }
    if !(ess >= 0.0 && ess.is_finite()) {
        return Err(Error::domain("ess", ess, "finite and non-negative"));
    }
    Ok(ess / seconds)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub ess: f64,
    pub r_hat: f64,
    pub mix_percent: f64,
    pub efficiency: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub beta: Vec<ParameterSummary>,
    pub sigma2: ParameterSummary,
    pub lambda2: ParameterSummary,
    /// Median ESS over the coefficients.
    pub beta_ess: f64,
    pub beta_mix_percent: f64,
    pub beta_efficiency: f64,
    /// Draws per chain.
    pub n_draws: usize,
    pub n_chains: usize,
    /// Longest chain time including burn-in; efficiencies divide by this.
    pub seconds: f64,
    /// Longest chain time excluding burn-in.
    pub sampling_seconds: f64,
}

impl DiagnosticsReport {
    pub fn max_r_hat(&self) -> f64 {
        self.beta
            .iter()
            .chain([&self.sigma2, &self.lambda2])
            .filter(|s| !s.degenerate)
            .map(|s| s.r_hat)
            .fold(1.0, f64::max)
    }
}

fn summarize(name: String, chains: &[Vec<f64>], n_total: usize, seconds: f64) -> Result<ParameterSummary> {
    let ess = ess_bulk(chains)?;
    let r_hat = split_r_hat(chains)?;
    let pooled: Vec<f64> = chains.iter().flatten().copied().collect();
    let mu = mean(&pooled);
    let sd = sample_variance(&pooled, mu).sqrt();
    Ok(ParameterSummary {
        name,
        mean: mu,
        sd,
        ess: ess.value,
        r_hat: r_hat.value,
        mix_percent: mix_percent(ess.value, n_total)?,
        efficiency: efficiency(ess.value, seconds)?,
        degenerate: ess.degenerate,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Summaries over a set of chains from one sampler. Mix % uses the total
/// number of retained draws across chains; efficiency divides by the
/// longest chain's time including burn-in.
pub fn diagnose(chains: &[ChainOutput]) -> Result<DiagnosticsReport> {
    let Some(first) = chains.first() else {
        return Err(Error::Config("at least one chain is required".into()));
    };
    let (n, p) = (first.n_samples(), first.p());
    if chains.iter().any(|c| c.n_samples() != n || c.p() != p) {
        return Err(Error::Config("chains must share draw count and dimension".into()));
    }
    let n_total = n * chains.len();
    let seconds = chains.iter().map(|c| c.total_seconds).fold(0.0, f64::max).max(1e-9);
    let sampling_seconds = chains.iter().map(|c| c.sampling_seconds).fold(0.0, f64::max);

    let mut beta = Vec::with_capacity(p);
    for j in 0..p {
        let draws: Vec<Vec<f64>> = chains
            .iter()
            .map(|c| c.beta_draws.column(j).iter().copied().collect())
            .collect();
        beta.push(summarize(format!("beta[{}]", j + 1), &draws, n_total, seconds)?);
    }
    let sigma2: Vec<Vec<f64>> = chains.iter().map(|c| c.sigma2_draws.clone()).collect();
    let lambda2: Vec<Vec<f64>> = chains.iter().map(|c| c.lambda2_draws.clone()).collect();
    let mut ess: Vec<f64> = beta.iter().map(|s| s.ess).collect();
    let beta_ess = median(&mut ess);
    Ok(DiagnosticsReport {
        beta_mix_percent: mix_percent(beta_ess, n_total)?,
        beta_efficiency: efficiency(beta_ess, seconds)?,
        beta_ess,
        beta,
        sigma2: summarize("sigma2".into(), &sigma2, n_total, seconds)?,
        lambda2: summarize("lambda2".into(), &lambda2, n_total, seconds)?,
        n_draws: n,
        n_chains: chains.len(),
        seconds,
        sampling_seconds,
    })
}
