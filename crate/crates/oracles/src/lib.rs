//! Reference routines for the test suites.
//!
//! Nothing in here shares code with `bayes-lasso`: the quadrature, the normal
//! CDF and the goodness-of-fit statistics are written from scratch so that a
//! test comparing the library against these values checks two independent
//! computations.

use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel; returns (kronrod estimate, |kronrod - gauss|,
/// kronrod estimate of the integral of |f|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(centre - half * x);
        let f2 = f(centre + half * x);
        kronrod += wk * (f1 + f2);
        abs += wk * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs(), abs * half.abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, depth: u32) -> f64 {
    let (est, err, abs) = gk15(f, a, b);
    // the second test stops refinement once the panel is at roundoff level
    if err <= abs_tol || err <= 50.0 * f64::EPSILON * abs || depth == 0 {
        return est;
    }
    let mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * abs_tol, depth - 1) + adapt(f, mid, b, 0.5 * abs_tol, depth - 1)
}

/// Adaptive Gauss-Kronrod quadrature of `f` over the finite interval `[a, b]`.
///
/// The interval is first cut into 32 panels to get a scale for the absolute
/// tolerance, then each panel is bisected until its Kronrod/Gauss gap drops
/// below its share of `rel_tol * |integral|`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    const PANELS: usize = 32;
    let h = (b - a) / PANELS as f64;
    let coarse: f64 = (0..PANELS)
        .map(|i| gk15(&f, a + i as f64 * h, a + (i + 1) as f64 * h).0.abs())
        .sum();
    let abs_tol = (rel_tol * coarse).max(f64::MIN_POSITIVE) / PANELS as f64;
    (0..PANELS)
        .map(|i| adapt(&f, a + i as f64 * h, a + (i + 1) as f64 * h, abs_tol, 40))
        .sum()
}

/// Integrates `exp(log_f(x) - shift)` over the whole real line, where
/// `log_f` is unimodal (or log-concave) with its peak at `peak`.
///
/// The support is found by stepping out geometrically from `peak` until the
/// log-integrand has dropped 800 nats below the peak, and `extra_breaks`
/// (kinks such as the origin for the Lasso kernel) are added as panel
/// boundaries. Returns `(integral, shift)` where `shift = log_f(peak)`; the
/// true integral of `exp(log_f)` is `integral * exp(shift)`.
pub fn integrate_log_density<F: Fn(f64) -> f64>(
    log_f: F,
    peak: f64,
    scale: f64,
    extra_breaks: &[f64],
    rel_tol: f64,
) -> (f64, f64) {
    let (lo, hi, shift) = effective_support(&log_f, peak, scale);
    let integrand = |x: f64| (log_f(x) - shift).exp();
    (integrate_pieces(integrand, lo, hi, peak, extra_breaks, rel_tol), shift)
}

/// Like [`integrate_log_density`] but weights the density by `g(x)`.
pub fn integrate_weighted<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(
    log_f: F,
    g: G,
    peak: f64,
    scale: f64,
    extra_breaks: &[f64],
    rel_tol: f64,
) -> (f64, f64) {
    let (lo, hi, shift) = effective_support(&log_f, peak, scale);
    let integrand = |x: f64| g(x) * (log_f(x) - shift).exp();
    (integrate_pieces(integrand, lo, hi, peak, extra_breaks, rel_tol), shift)
}

/// Returns `(lo, hi, log_f(peak))` with `log_f < log_f(peak) - 800` at both ends.
pub fn effective_support<F: Fn(f64) -> f64>(log_f: &F, peak: f64, scale: f64) -> (f64, f64, f64) {
    let top = log_f(peak);
    let floor = top - 800.0;
    let mut step = scale;
    let mut lo = peak - step;
    while log_f(lo) > floor {
        step *= 2.0;
        lo = peak - step;
    }
    step = scale;
    let mut hi = peak + step;
    while log_f(hi) > floor {
        step *= 2.0;
        hi = peak + step;
    }
    (lo, hi, top)
}

fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    peak: f64,
    extra_breaks: &[f64],
    rel_tol: f64,
) -> f64 {
    let mut breaks = vec![lo, hi, peak];
    breaks.extend(extra_breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    // Peak-centred rings at doubling distances make the panels fine where the
    // integrand is concentrated even when the support is very wide.
    let width = hi - lo;
    let mut ring = width * 1e-6;
    while ring < width {
        for x in [peak - ring, peak + ring] {
            if x > lo && x < hi {
                breaks.push(x);
            }
        }
        ring *= 2.0;
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    breaks.windows(2).map(|w| integrate(&f, w[0], w[1], rel_tol)).sum()
}

/// erfc by series (small |z|) or continued fraction (large z).
pub fn erfc(z: f64) -> f64 {
    if z < 0.0 {
        return 2.0 - erfc(-z);
    }
    if z < 2.0 {
        // erf(z) = 2/sqrt(pi) exp(-z^2) sum_n 2^n z^(2n+1) / (1*3*...*(2n+1))
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        let mut n = 0.0;
        while term > 1e-18 * sum {
            n += 1.0;
            term *= 2.0 * z2 / (2.0 * n + 1.0);
            sum += term;
        }
        1.0 - 2.0 / PI.sqrt() * (-z2).exp() * sum
    } else {
        // erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
        let mut frac = 0.0;
        for k in (1..=300).rev() {
            frac = (k as f64 / 2.0) / (z + frac);
        }
        (-z * z).exp() / PI.sqrt() / (z + frac)
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Kolmogorov-Smirnov statistic of `samples` against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Critical value of the one-sample KS statistic at significance 0.01
/// (Stephens' small-sample correction of the asymptotic 1.628 quantile).
pub fn ks_critical_01(n: usize) -> f64 {
    let rn = (n as f64).sqrt();
    1.628 / (rn + 0.12 + 0.11 / rn)
}

/// Upper 0.01 quantile of chi-squared with `df` degrees of freedom
/// (Wilson-Hilferty).
pub fn chi2_critical_01(df: usize) -> f64 {
    let k = df as f64;
    let z = 2.326_347_874_040_841;
    let h = 2.0 / (9.0 * k);
    k * (1.0 - h + z * h.sqrt()).powi(3)
}

/// Sample mean and its standard error, treating the draws as independent.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sample variance and its standard error from the fourth central moment.
pub fn variance_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    (var, ((m4 - m2 * m2) / n).sqrt())
}
