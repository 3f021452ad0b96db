//! Gibbs samplers for Bayesian Lasso regression.
//!
//! Model: `y ~ N(Xβ, σ² I)`, `β_j | σ², λ² ~ Laplace(rate λ/σ)`,
//! `σ² ~ IG(ã, b̃)`, `λ² ~ Gamma(u, v)` (shape/rate).
//!
//! [`pc_gibbs`] writes the Laplace prior as `β_j ~ N(0, σ²/(a_j λ²))` with
//! `a_j ~ IG(1, 1/2)` and updates β in one block. [`hans_gibbs`] draws each
//! `β_j` from its Lasso full conditional and slice-samples σ² and λ².

use std::time::Instant;

use log::info;
use nalgebra::{DMatrix, DVector};

use crate::distribution::{lasso_draw_any, LassoParams};
use crate::error::{Error, Result};
use crate::par::{try_map_indexed, Execution};
use crate::samplers::{
    factorization_count, gamma_sample, inverse_gamma_sample, inverse_gaussian_sample, mvn_sample,
    slice_sample_log_step, PrecisionFactor, RngStream, SliceConfig,
};

/// Smallest `|β_j|` used in the auxiliary-variable update, whose inverse
/// Gaussian mean is `σ / (λ |β_j|)`.
pub const BETA_ABS_FLOOR: f64 = 1e-10;

/// Centred response, standardized design and the Gram quantities both
/// samplers reuse.
#[derive(Debug, Clone)]
pub struct RegressionData {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub xtx: DMatrix<f64>,
    pub xty: DVector<f64>,
    pub y_sq_norm: f64,
    pub col_sq_norms: DVector<f64>,
}

impl RegressionData {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Config(format!(
                "design has {} rows but the response has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::Config("design must have at least one row and one column".into()));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Config("design and response must be finite".into()));
        }
        let xtx = x.tr_mul(&x);
        let xty = x.tr_mul(&y);
        let y_sq_norm = y.norm_squared();
        let col_sq_norms = xtx.diagonal();
        Ok(Self {
            x,
            y,
            xtx,
            xty,
            y_sq_norm,
            col_sq_norms,
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Bookkeeping path the coordinate sampler uses for this shape.
    pub fn default_path(&self) -> CoordinatePath {
        if self.n() > self.p() {
            CoordinatePath::Gram
        } else {
            CoordinatePath::Residual
        }
    }

    pub fn rss(&self, beta: &DVector<f64>) -> f64 {
        (&self.y - &self.x * beta).norm_squared()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorHyperparams {
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub u: f64,
    pub v: f64,
}

impl Default for PriorHyperparams {
    fn default() -> Self {
        Self {
            a_tilde: 0.01,
            b_tilde: 0.01,
            u: 0.01,
            v: 0.01,
        }
    }
}

impl PriorHyperparams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("a1", self.a_tilde),
            ("b1", self.b_tilde),
            ("u1", self.u),
            ("v1", self.v),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!(
                    "hyperparameter {name} must be finite and positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    Pc,
    Hans,
}

impl Sampler {
    pub fn name(self) -> &'static str {
        match self {
            Sampler::Pc => "PC",
            Sampler::Hans => "Hans",
        }
    }
}

impl std::str::FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pc" => Ok(Sampler::Pc),
            "hans" => Ok(Sampler::Hans),
            other => Err(Error::Config(format!("unknown sampler '{other}' (expected pc or hans)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsConfig {
    pub n_samples: usize,
    pub n_burnin: usize,
    pub seed: u64,
    pub sigma2_init: f64,
    pub lambda2_init: f64,
    /// Starting coefficients; zero when absent.
    pub beta_init: Option<Vec<f64>>,
    pub verbose: bool,
    pub slice: SliceConfig,
    /// Holds λ² fixed at this value in the PC sampler and skips the
    /// auxiliary-variable update. Zero reduces the β draw to the flat-prior
    /// linear-model conditional; used to test the sampler against OLS.
    #[doc(hidden)]
    pub pin_lambda2: Option<f64>,
    /// Recomputes `‖y - Xβ‖²` after every coordinate sweep and records the
    /// largest relative gap to the tracked value in [`SweepStats`].
    #[doc(hidden)]
    pub audit_rss: bool,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self {
            n_samples: 5000,
            n_burnin: 1000,
            seed: 1,
            sigma2_init: 1.0,
            lambda2_init: 1.0,
            beta_init: None,
            verbose: false,
            slice: SliceConfig::default(),
            pin_lambda2: None,
            audit_rss: false,
        }
    }
}

impl GibbsConfig {
    fn validate(&self, p: usize) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Config("nsamples must be at least 1".into()));
        }
        if !(self.sigma2_init > 0.0 && self.sigma2_init.is_finite()) {
            return Err(Error::Config("sigma2-init must be finite and positive".into()));
        }
        if !(self.lambda2_init > 0.0 && self.lambda2_init.is_finite()) {
            return Err(Error::Config("lambda2-init must be finite and positive".into()));
        }
        if let Some(beta) = &self.beta_init {
            if beta.len() != p {
                return Err(Error::Config(format!(
                    "beta-init has {} entries, expected {p}",
                    beta.len()
                )));
            }
            if beta.iter().any(|b| !b.is_finite()) {
                return Err(Error::Config("beta-init must be finite".into()));
            }
        }
        self.slice.validate()
    }

    fn initial_beta(&self, p: usize) -> DVector<f64> {
        match &self.beta_init {
            Some(b) => DVector::from_column_slice(b),
            None => DVector::zeros(p),
        }
    }
}

/// Work counters for one chain.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweepStats {
    /// Dense p×p factorizations performed while sampling.
    pub factorizations: u64,
    pub coordinate_updates: u64,
    /// Longest vector operation performed inside a coordinate update.
    pub max_coordinate_vector_len: usize,
    /// Total vector elements touched inside coordinate updates.
    pub coordinate_vector_elements: u64,
    /// Slice updates that ran out of shrinkage steps.
    pub slice_exhausted: u64,
    /// Largest relative RSS discrepancy seen when `audit_rss` is set.
    pub max_rss_rel_error: f64,
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    /// `n_samples × p`, one row per retained draw.
    pub beta_draws: DMatrix<f64>,
    pub sigma2_draws: Vec<f64>,
    pub lambda2_draws: Vec<f64>,
    /// Seconds spent producing the retained draws.
    pub sampling_seconds: f64,
    /// Seconds including burn-in.
    pub total_seconds: f64,
    pub sampler: Sampler,
    pub stats: SweepStats,
}

impl ChainOutput {
    pub fn n_samples(&self) -> usize {
        self.sigma2_draws.len()
    }

    pub fn p(&self) -> usize {
        self.beta_draws.ncols()
    }
}

struct Recorder {
    beta: DMatrix<f64>,
    sigma2: Vec<f64>,
    lambda2: Vec<f64>,
    burnin: usize,
    started: Instant,
    sampling_started: Option<Instant>,
    verbose: bool,
    total: usize,
    label: &'static str,
}

impl Recorder {
    fn new(config: &GibbsConfig, p: usize, label: &'static str) -> Self {
        Self {
            beta: DMatrix::zeros(config.n_samples, p),
            sigma2: Vec::with_capacity(config.n_samples),
            lambda2: Vec::with_capacity(config.n_samples),
            burnin: config.n_burnin,
            started: Instant::now(),
            sampling_started: if config.n_burnin == 0 { Some(Instant::now()) } else { None },
            verbose: config.verbose,
            total: config.n_burnin + config.n_samples,
            label,
        }
    }

    fn record(&mut self, iter: usize, beta: &DVector<f64>, sigma2: f64, lambda2: f64) -> Result<()> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::NonFinite {
                iteration: iter + 1,
                what: format!("sigma2 = {sigma2}"),
            });
        }
        if !(lambda2 >= 0.0 && lambda2.is_finite()) {
            return Err(Error::NonFinite {
                iteration: iter + 1,
                what: format!("lambda2 = {lambda2}"),
            });
        }
        if let Some(j) = beta.iter().position(|b| !b.is_finite()) {
            return Err(Error::NonFinite {
                iteration: iter + 1,
                what: format!("beta[{j}] = {}", beta[j]),
            });
        }
        if iter + 1 == self.burnin {
            self.sampling_started = Some(Instant::now());
        }
        if iter >= self.burnin {
            let row = iter - self.burnin;
            self.beta.row_mut(row).copy_from(&beta.transpose());
            self.sigma2.push(sigma2);
            self.lambda2.push(lambda2);
        }
        if self.verbose && (iter + 1) % 1000 == 0 {
            info!("{} sampler: iteration {} of {}", self.label, iter + 1, self.total);
        }
        Ok(())
    }

    fn finish(self, sampler: Sampler, stats: SweepStats) -> ChainOutput {
        let total_seconds = self.started.elapsed().as_secs_f64();
        let sampling_seconds = self
            .sampling_started
            .map(|t| t.elapsed().as_secs_f64())
            .unwrap_or(total_seconds);
        ChainOutput {
            beta_draws: self.beta,
            sigma2_draws: self.sigma2,
            lambda2_draws: self.lambda2,
            sampling_seconds,
            total_seconds,
            sampler,
            stats,
        }
    }
}

/// Block Gibbs sampler with auxiliary scale variables `a_j`.
///
/// Per iteration: `β ~ N(Q⁻¹Xᵀy, σ² Q⁻¹)` with `Q = XᵀX + λ² diag(a)`;
/// `σ² ~ IG(ã + (n+p)/2, b̃ + ½‖y‖² - yᵀXβ + ½βᵀQβ)`;
/// `λ² ~ Gamma(u + p/2, v + βᵀ diag(a) β / (2σ²))`;
/// `a_j ~ InvGaussian(mean σ/(λ|β_j|), shape 1)`.
///
/// The `a_j` update conditions on the β drawn in the same iteration, so each
/// step is an exact full-conditional draw.
pub fn pc_gibbs(
    data: &RegressionData,
    priors: &PriorHyperparams,
    config: &GibbsConfig,
    rng: &mut RngStream,
) -> Result<ChainOutput> {
    priors.validate()?;
    let (n, p) = (data.n(), data.p());
    config.validate(p)?;
    if let Some(l2) = config.pin_lambda2 {
        if !(l2 >= 0.0 && l2.is_finite()) {
            return Err(Error::Config("pinned lambda2 must be finite and non-negative".into()));
        }
    }

    let factorizations_before = factorization_count();
    let mut rec = Recorder::new(config, p, "PC");
    let mut sigma2 = config.sigma2_init;
    let mut lambda2 = config.pin_lambda2.unwrap_or(config.lambda2_init);
    // β is drawn first, so a starting β only enters through the scales
    let mut aux = DVector::from_element(p, 1.0);
    if let Some(init) = &config.beta_init {
        let scale = (sigma2 / lambda2.max(f64::MIN_POSITIVE)).sqrt();
        for (a, b) in aux.iter_mut().zip(init) {
            *a = inverse_gaussian_sample(scale / b.abs().max(BETA_ABS_FLOOR), 1.0, rng)?;
        }
    }
    let sigma_shape = priors.a_tilde + 0.5 * (n + p) as f64;
    let lambda_shape = priors.u + 0.5 * p as f64;

    for iter in 0..config.n_burnin + config.n_samples {
        let mut q = data.xtx.clone();
        for j in 0..p {
            q[(j, j)] += lambda2 * aux[j];
        }
        let factor = PrecisionFactor::new(q.clone()).map_err(|e| match e {
            Error::NotPositiveDefinite { order, min_diag } => Error::NonFinite {
                iteration: iter + 1,
                what: format!(
                    "precision matrix of order {order} not positive definite (min diagonal {min_diag:e})"
                ),
            },
            other => other,
        })?;
        let mean = factor.solve(&data.xty);
        let beta = mvn_sample(&mean, &factor, sigma2, rng)?;

        let quad = beta.dot(&(&q * &beta));
        let rate = priors.b_tilde + 0.5 * data.y_sq_norm - data.xty.dot(&beta) + 0.5 * quad;
        // the rate is ½‖y - Xβ‖² + ½λ²βᵀAβ + b̃ > 0; guard against rounding
        sigma2 = inverse_gamma_sample(sigma_shape, rate.max(priors.b_tilde), rng)?;

        if config.pin_lambda2.is_none() {
            let weighted: f64 = beta.iter().zip(aux.iter()).map(|(b, a)| a * b * b).sum();
            lambda2 = gamma_sample(lambda_shape, priors.v + weighted / (2.0 * sigma2), rng)?;

            let scale = sigma2.sqrt() / lambda2.sqrt();
            for j in 0..p {
                let mean = scale / beta[j].abs().max(BETA_ABS_FLOOR);
                aux[j] = inverse_gaussian_sample(mean, 1.0, rng)?;
            }
        }
        rec.record(iter, &beta, sigma2, lambda2)?;
    }

    let stats = SweepStats {
        factorizations: factorization_count() - factorizations_before,
        ..SweepStats::default()
    };
    Ok(rec.finish(Sampler::Pc, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinatePath {
    /// Track `δ = XᵀXβ`; O(p) per coordinate.
    Gram,
    /// Track the fitted values `ŷ = Xβ`; O(n) per coordinate.
    Residual,
}

/// `(a, b, c)` of the full conditional of `β_j`:
/// `a = ‖X_j‖²/σ²`, `b = X_jᵀ(y - X₋ⱼβ₋ⱼ)/σ²`, `c = λ/σ`.
///
/// Returns the raw triple because `a` is zero for an all-zero column, which
/// [`LassoParams`] accepts but the inverse-CDF surface does not.
pub fn coordinate_params(
    data: &RegressionData,
    beta: &DVector<f64>,
    j: usize,
    sigma2: f64,
    lambda: f64,
    path: CoordinatePath,
) -> Result<LassoParams> {
    if j >= data.p() || beta.len() != data.p() {
        return Err(Error::Config(format!(
            "coordinate {j} out of range for p = {}",
            data.p()
        )));
    }
    let partial = match path {
        CoordinatePath::Gram => {
            let off_diag = data.xtx.column(j).dot(beta) - data.xtx[(j, j)] * beta[j];
            data.xty[j] - off_diag
        }
        CoordinatePath::Residual => {
            let fitted = &data.x * beta;
            let col = data.x.column(j);
            data.xty[j] - col.dot(&fitted) + data.col_sq_norms[j] * beta[j]
        }
    };
    LassoParams::new(data.col_sq_norms[j] / sigma2, partial / sigma2, lambda / sigma2.sqrt())
}

/// Coordinate-wise Gibbs sampler with Lasso full conditionals.
///
/// Each `β_j` is drawn from `Lasso(‖X_j‖²/σ², b_j/σ², λ/σ)`. For `n > p` the
/// partial fits come from `δ = XᵀXβ`, otherwise from the fitted vector
/// `ŷ = Xβ`; either way a coordinate costs O(min(n, p)) and no p×p system is
/// ever factorized. σ² and λ² are slice-sampled from
///
/// `ln p(σ²) = -(ã + (n+p)/2 + 1) ln σ² - (b̃ + RSS/2)/σ² - (λ/σ)‖β‖₁`
///
/// `ln p(λ²) = (u + p/2 - 1) ln λ² - v λ² - (λ/σ)‖β‖₁`
///
/// on the log scale.
pub fn hans_gibbs(
    data: &RegressionData,
    priors: &PriorHyperparams,
    config: &GibbsConfig,
    rng: &mut RngStream,
) -> Result<ChainOutput> {
    hans_gibbs_with_path(data, priors, config, data.default_path(), rng)
}

/// [`hans_gibbs`] with the bookkeeping path chosen by the caller.
pub fn hans_gibbs_with_path(
    data: &RegressionData,
    priors: &PriorHyperparams,
    config: &GibbsConfig,
    path: CoordinatePath,
    rng: &mut RngStream,
) -> Result<ChainOutput> {
    priors.validate()?;
    let (n, p) = (data.n(), data.p());
    config.validate(p)?;

    let factorizations_before = factorization_count();
    let mut stats = SweepStats::default();
    let mut rec = Recorder::new(config, p, "Hans");
    let mut beta = config.initial_beta(p);
    let mut sigma2 = config.sigma2_init;
    let mut lambda2 = config.lambda2_init;
    let sigma_power = priors.a_tilde + 0.5 * (n + p) as f64 + 1.0;
    let lambda_power = priors.u + 0.5 * p as f64 - 1.0;

    let mut delta = DVector::zeros(p);
    let mut fitted = DVector::zeros(n);

    for iter in 0..config.n_burnin + config.n_samples {
        let lambda = lambda2.sqrt();
        let sigma = sigma2.sqrt();
        let c = lambda / sigma;

        let rss = match path {
            CoordinatePath::Gram => {
                delta.gemv(1.0, &data.xtx, &beta, 0.0);
                for j in 0..p {
                    let old = beta[j];
                    if old != 0.0 {
                        delta.axpy(-old, &data.xtx.column(j), 1.0);
                    }
                    let b = (data.xty[j] - delta[j]) / sigma2;
                    let params = LassoParams::new(data.col_sq_norms[j] / sigma2, b, c)?;
                    let new = lasso_draw_any(&params, rng)?;
                    beta[j] = new;
                    if new != 0.0 {
                        delta.axpy(new, &data.xtx.column(j), 1.0);
                    }
                    stats.coordinate_updates += 1;
                    stats.coordinate_vector_elements += 2 * p as u64;
                    stats.max_coordinate_vector_len = stats.max_coordinate_vector_len.max(p);
                }
                (data.y_sq_norm - 2.0 * data.xty.dot(&beta) + beta.dot(&delta)).max(0.0)
            }
            CoordinatePath::Residual => {
                fitted.gemv(1.0, &data.x, &beta, 0.0);
                for j in 0..p {
                    let old = beta[j];
                    let col = data.x.column(j);
                    let partial = data.xty[j] - col.dot(&fitted) + data.col_sq_norms[j] * old;
                    let params = LassoParams::new(data.col_sq_norms[j] / sigma2, partial / sigma2, c)?;
                    let new = lasso_draw_any(&params, rng)?;
                    beta[j] = new;
                    if new != old {
                        fitted.axpy(new - old, &col, 1.0);
                    }
                    stats.coordinate_updates += 1;
                    stats.coordinate_vector_elements += 2 * n as u64;
                    stats.max_coordinate_vector_len = stats.max_coordinate_vector_len.max(n);
                }
                (&data.y - &fitted).norm_squared()
            }
        };

        if config.audit_rss {
            let exact = data.rss(&beta);
            let gap = (exact - rss).abs() / exact.max(f64::MIN_POSITIVE);
            stats.max_rss_rel_error = stats.max_rss_rel_error.max(gap);
        }

        let l1 = beta.lp_norm(1);
        let sigma_target = |s2: f64| {
            -sigma_power * s2.ln() - (priors.b_tilde + 0.5 * rss) / s2 - lambda * l1 / s2.sqrt()
        };
        let step = slice_sample_log_step(sigma_target, sigma2, &config.slice, rng)?;
        stats.slice_exhausted += step.exhausted as u64;
        sigma2 = step.value;

        let sigma = sigma2.sqrt();
        let lambda_target =
            |l2: f64| lambda_power * l2.ln() - priors.v * l2 - l2.sqrt() * l1 / sigma;
        let step = slice_sample_log_step(lambda_target, lambda2, &config.slice, rng)?;
        stats.slice_exhausted += step.exhausted as u64;
        lambda2 = step.value;

        rec.record(iter, &beta, sigma2, lambda2)?;
    }

    stats.factorizations = factorization_count() - factorizations_before;
    Ok(rec.finish(Sampler::Hans, stats))
}

/// Runs `chains` independent chains; chain `k` uses stream `k + 1` of
/// `config.seed`, so the draws are the same under either execution mode.
pub fn run_chains(
    data: &RegressionData,
    priors: &PriorHyperparams,
    config: &GibbsConfig,
    sampler: Sampler,
    chains: usize,
    exec: Execution,
) -> Result<Vec<ChainOutput>> {
    if chains == 0 {
        return Err(Error::Config("at least one chain is required".into()));
    }
    try_map_indexed(chains, exec, |k| {
        let mut rng = RngStream::with_stream(config.seed, k as u64 + 1);
        match sampler {
            Sampler::Pc => pc_gibbs(data, priors, config, &mut rng),
            Sampler::Hans => hans_gibbs(data, priors, config, &mut rng),
        }
    })
}
