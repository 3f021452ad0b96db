//! Stochastic building blocks shared by the distribution and the Gibbs
//! samplers.
//!
//! Gamma-family quantities use the shape/rate convention throughout, so
//! `Gamma(shape, rate)` has mean `shape / rate`.

use std::cell::Cell;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::special::ln_mills;

/// A seeded, splittable random stream.
///
/// Backed by ChaCha8, whose output is fixed by the algorithm rather than the
/// platform. Distinct `stream` ids under one seed give statistically
/// independent sequences, which is how chains and parallel blocks get their
/// own generators.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Uniform on the open interval (0, 1): 53 random bits placed at bin centres.
#[inline]
pub fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, value, "finite and strictly positive"))
    }
}

/// Draw from `Gamma(shape, rate)` (mean `shape / rate`).
pub fn gamma_sample<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    check_positive("shape", shape)?;
    check_positive("rate", rate)?;
    let dist = Gamma::new(shape, 1.0 / rate)
        .map_err(|_| Error::domain("rate", rate, "a representable gamma scale"))?;
    Ok(dist.sample(rng))
}

/// Draw from the inverse gamma with density `∝ x^(-shape-1) exp(-rate / x)`,
/// i.e. the reciprocal of a `Gamma(shape, rate)` draw.
pub fn inverse_gamma_sample<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    Ok(1.0 / gamma_sample(shape, rate, rng)?)
}

/// Draw from the inverse Gaussian with the given mean and shape
/// (variance `mean³ / shape`), by the Michael-Schucany-Haas transformation.
pub fn inverse_gaussian_sample<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> Result<f64> {
    check_positive("mean", mean)?;
    check_positive("shape", shape)?;
    let nu = standard_normal(rng);
    let y = nu * nu;
    let my = mean * y;
    // smaller root of the quadratic, written without the usual cancellation:
    // x = mean + mean/(2 shape) (my - sqrt(4 mean shape y + my²))
    let root = (my * my + 4.0 * mean * shape * y).sqrt();
    let denom = my + root;
    let x = if denom > 0.0 {
        4.0 * mean * mean * shape * y / (denom * denom)
    } else {
        mean
    };
    let u = uniform_open(rng);
    if u * (mean + x) <= mean {
        Ok(x)
    } else {
        Ok(mean * (mean / x))
    }
}

/// Draw from the `a = 0` limit of the Lasso law, density `∝ exp(b x - c|x|)`,
/// which needs `c > |b|`: an asymmetric Laplace with left rate `c + b` and
/// right rate `c - b`.
pub fn asymmetric_laplace_sample<R: Rng + ?Sized>(b: f64, c: f64, rng: &mut R) -> Result<f64> {
    if !(b.is_finite() && c.is_finite() && c > b.abs()) {
        return Err(Error::InvalidParams {
            a: 0.0,
            b,
            c,
            reason: "with a = 0 the density is only normalizable when c > |b|",
        });
    }
    let left_mass = (c - b) / (2.0 * c);
    let e: f64 = Exp1.sample(rng);
    if uniform_open(rng) < left_mass {
        Ok(-e / (c + b))
    } else {
        Ok(e / (c - b))
    }
}

thread_local! {
    static FACTORIZATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Number of dense symmetric factorizations performed on this thread.
///
/// The Gibbs tests use it to check that the coordinate-wise sampler never
/// factorizes a p×p matrix.
pub fn factorization_count() -> u64 {
    FACTORIZATIONS.with(|c| c.get())
}

/// Cholesky factor of a symmetric positive-definite precision matrix.
#[derive(Clone, Debug)]
pub struct PrecisionFactor {
    chol: Cholesky<f64, Dyn>,
}

impl PrecisionFactor {
    pub fn new(precision: DMatrix<f64>) -> Result<Self> {
        FACTORIZATIONS.with(|c| c.set(c.get() + 1));
        let order = precision.nrows();
        let min_diag = precision.diagonal().min();
        Cholesky::new(precision)
            .map(|chol| Self { chol })
            .ok_or(Error::NotPositiveDefinite { order, min_diag })
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    /// Solves `Q x = rhs`.
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }
}

/// Draw from `N(mean, scale · Q⁻¹)` where `factor` holds the Cholesky factor
/// `Q = L Lᵀ`: with `z ~ N(0, I)`, `L⁻ᵀ z` has covariance `Q⁻¹`.
pub fn mvn_sample<R: Rng + ?Sized>(
    mean: &DVector<f64>,
    factor: &PrecisionFactor,
    scale: f64,
    rng: &mut R,
) -> Result<DVector<f64>> {
    check_positive("scale", scale)?;
    if mean.len() != factor.dim() {
        return Err(Error::Config(format!(
            "mean has length {} but the precision factor has order {}",
            mean.len(),
            factor.dim()
        )));
    }
    let z = DVector::from_fn(mean.len(), |_, _| standard_normal(rng));
    let v = factor
        .chol
        .l_dirty()
        .tr_solve_lower_triangular(&z)
        .expect("Cholesky factor has a non-zero diagonal");
    Ok(mean + v * scale.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Truncated to `x > 0`.
    Positive,
    /// Truncated to `x < 0`.
    Negative,
}

pub const MAX_TRUNC_ORDER: usize = 4;

/// Raw moments `E[X^k]`, `k = 1..=max_order`, of `N(mu, sigma²)` truncated to
/// one half-line.
///
/// Writing `X = sigma·T` with `T ≥ 0` distributed as `exp(-(t + α)²/2)`,
/// `α = -mu/sigma`, the ratios `R_k = E[T^k]` obey
/// `R_{k+1} = -α R_k + k R_{k-1}` with `R_1 = 1/m(α) - α`. That forward
/// recurrence cancels badly once `α` is large, so for `α ≥ 3` the ratios
/// `R_k / R_{k-1} = k / (α + R_{k+1}/R_k)` are run backwards as a continued
/// fraction instead.
pub fn trunc_normal_moments(mu: f64, sigma: f64, side: Side, max_order: usize) -> Result<Vec<f64>> {
    check_positive("sigma", sigma)?;
    if !mu.is_finite() {
        return Err(Error::domain("mu", mu, "finite"));
    }
    if !(1..=MAX_TRUNC_ORDER).contains(&max_order) {
        return Err(Error::domain(
            "max_order",
            max_order as f64,
            "an order between 1 and 4",
        ));
    }
    let (mu, sign) = match side {
        Side::Positive => (mu, 1.0),
        Side::Negative => (-mu, -1.0),
    };
    let alpha = -mu / sigma;
    let ratios = standardized_trunc_ratios(alpha);
    let mut out = Vec::with_capacity(max_order);
    let mut scale = 1.0;
    for ratio in ratios.iter().take(max_order) {
        scale *= sign * sigma;
        out.push(scale * ratio);
    }
    Ok(out)
}

fn standardized_trunc_ratios(alpha: f64) -> [f64; MAX_TRUNC_ORDER] {
    let mut r = [0.0; MAX_TRUNC_ORDER];
    if alpha < 3.0 {
        let r1 = (-ln_mills(alpha)).exp() - alpha;
        let (mut prev, mut cur) = (1.0, r1);
        r[0] = r1;
        for k in 1..MAX_TRUNC_ORDER {
            let next = -alpha * cur + k as f64 * prev;
            prev = cur;
            cur = next;
            r[k] = cur;
        }
    } else {
        const TERMS: usize = 80;
        let mut rho = [0.0; MAX_TRUNC_ORDER];
        let mut tail = 0.0;
        for k in (1..=TERMS).rev() {
            tail = k as f64 / (alpha + tail);
            if k <= MAX_TRUNC_ORDER {
                rho[k - 1] = tail;
            }
        }
        let mut acc = 1.0;
        for k in 0..MAX_TRUNC_ORDER {
            acc *= rho[k];
            r[k] = acc;
        }
    }
    r
}

/// Tuning for the univariate slice sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceConfig {
    pub initial_width: f64,
    pub max_stepout: usize,
    pub max_shrink: usize,
}

impl Default for SliceConfig {
    fn default() -> Self {
        Self {
            initial_width: 1.0,
            max_stepout: 64,
            max_shrink: 128,
        }
    }
}

impl SliceConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("initial_width", self.initial_width)?;
        if self.max_stepout == 0 || self.max_shrink == 0 {
            return Err(Error::Config(
                "slice sampler step counts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceOutcome {
    pub value: f64,
    /// Shrinkage ran out of attempts and the chain stayed at its current point.
    pub exhausted: bool,
    pub evaluations: usize,
}

/// One step-out/shrink slice update on `(0, ∞)`.
///
/// `log_density` is only evaluated at positive arguments; everything at or
/// below zero is outside the slice.
pub fn slice_sample_step<F, R>(
    log_density: F,
    current: f64,
    config: &SliceConfig,
    rng: &mut R,
) -> Result<SliceOutcome>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    let target = |x: f64| {
        if x > 0.0 && x.is_finite() {
            log_density(x)
        } else {
            f64::NEG_INFINITY
        }
    };
    slice_core(target, current, config, rng)
}

/// Slice update for a positive variable carried on the log scale.
///
/// The chain moves in `η = ln x` against `log_density(e^η) + η`, so a fixed
/// width suits the target whatever its magnitude. The result is a valid
/// update for the density of `x` itself.
pub fn slice_sample_log_step<F, R>(
    log_density: F,
    current: f64,
    config: &SliceConfig,
    rng: &mut R,
) -> Result<SliceOutcome>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    if !(current > 0.0) {
        return Err(Error::domain("current", current, "strictly positive"));
    }
    let target = |eta: f64| {
        let x = eta.exp();
        if x > 0.0 && x.is_finite() {
            log_density(x) + eta
        } else {
            f64::NEG_INFINITY
        }
    };
    let out = slice_core(target, current.ln(), config, rng)?;
    Ok(SliceOutcome {
        value: if out.exhausted { current } else { out.value.exp() },
        ..out
    })
}

fn slice_core<F, R>(
    target: F,
    x0: f64,
    config: &SliceConfig,
    rng: &mut R,
) -> Result<SliceOutcome>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    config.validate()?;
    let f0 = target(x0);
    if !f0.is_finite() {
        return Err(Error::domain(
            "current",
            x0,
            "a point where the log-density is finite",
        ));
    }
    let mut evaluations = 1;
    let e: f64 = Exp1.sample(rng);
    let level = f0 - e;
    let w = config.initial_width;

    let mut left = x0 - w * uniform_open(rng);
    let mut right = left + w;
    let mut j = (config.max_stepout as f64 * uniform_open(rng)).floor() as usize;
    let mut k = config.max_stepout - 1 - j;
    while j > 0 {
        evaluations += 1;
        if target(left) <= level {
            break;
        }
        left -= w;
        j -= 1;
    }
    while k > 0 {
        evaluations += 1;
        if target(right) <= level {
            break;
        }
        right += w;
        k -= 1;
    }

    for _ in 0..config.max_shrink {
        let x1 = left + (right - left) * uniform_open(rng);
        evaluations += 1;
        if target(x1) > level {
            return Ok(SliceOutcome {
                value: x1,
                exhausted: false,
                evaluations,
            });
        }
        if x1 < x0 {
            left = x1;
        } else {
            right = x1;
        }
    }
    Ok(SliceOutcome {
        value: x0,
        exhausted: true,
        evaluations,
    })
}
