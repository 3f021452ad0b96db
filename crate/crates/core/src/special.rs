//! Scalar kernels for the standard normal distribution on the log scale.
//!
//! Everything here is built on Mill's ratio `m(x) = Φ(-x)/φ(x)`. For `x ≥ 0`
//! it is a degree-(8, 9) rational function that keeps about 14 significant
//! figures on `[0, 2000]` and is replaced by its `1/x` asymptote beyond
//! `1.75e34`, where the Horner evaluation would start to overflow. The left
//! half-line follows from `m(x) = 1/φ(x) - m(-x)`.
//!
//! Tail probabilities are never formed as `1 - Φ(x)`: `Φ(-x) = φ(x) m(x)`
//! for `x ≥ 0`, which stays accurate (or moves to the log scale) all the way
//! out to the end of the double range.

use crate::error::{Error, Result};

/// `ln √(2π)`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
/// `√(2π)`
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// `|x|` at and beyond which `1/φ(x)` is assembled from its logarithm.
pub const LOG_SPACE_THRESHOLD: f64 = 37.0;

/// Above this the rational form is replaced by `1/x`.
pub const ASYMPTOTIC_THRESHOLD: f64 = 1.75e34;

/// Numerator and denominator of the rational Mill's ratio approximation,
/// lowest order first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalCoefficients {
    pub numerator: [f64; 9],
    pub denominator: [f64; 10],
}

pub const MILLS_RATIONAL: RationalCoefficients = RationalCoefficients {
    numerator: [
        46697.7602201933,
        69339.6909002865,
        50590.6980372328,
        23184.62760379742,
        7236.31450136984,
        1572.136841909630,
        232.9967987466022,
        21.74833514806325,
        1.000000000000095,
    ],
    denominator: [
        37259.42190376593,
        85053.78630172011,
        89598.92885811838,
        57370.93777717682,
        24713.27114352290,
        7467.311205544661,
        1593.885178714749,
        233.9967987305447,
        21.74833514813385,
        1.0,
    ],
};

impl RationalCoefficients {
    /// Horner evaluation, innermost coefficient first.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let num = self.numerator.iter().rev().fold(0.0, |acc, &p| p + x * acc);
        let den = self.denominator.iter().rev().fold(0.0, |acc, &q| q + x * acc);
        num / den
    }
}

/// Mill's ratio for `x ≥ 0`, no argument checks.
#[inline]
pub(crate) fn mills_pos(x: f64) -> f64 {
    if x < ASYMPTOTIC_THRESHOLD {
        MILLS_RATIONAL.eval(x)
    } else {
        1.0 / x
    }
}

/// `ln m(x)` for any finite `x`, no argument checks.
#[inline]
pub(crate) fn ln_mills(x: f64) -> f64 {
    if x >= 0.0 {
        mills_pos(x).ln()
    } else {
        // m(x) = (1 - Φ(x)) / φ(x) with Φ(x) = φ(x) m(-x)
        let ln_inv_pdf = 0.5 * x * x + LN_SQRT_2PI;
        let lower = (-ln_inv_pdf).exp() * mills_pos(-x);
        ln_inv_pdf + (-lower).ln_1p()
    }
}

/// Mill's ratio `m(x) = Φ(-x)/φ(x)` for `x ≥ 0`.
pub fn mills_ratio_positive(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain("x", x, "finite and non-negative"));
    }
    Ok(mills_pos(x))
}

/// Mill's ratio on the whole real line.
///
/// Returns [`Error::MillsOverflow`] when `1/φ(x)` is not representable
/// (`x < -37.6` or so); callers that can meet such arguments should work
/// with [`log_mills_ratio`] instead.
pub fn mills_ratio(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("x", x, "finite"));
    }
    if x >= 0.0 {
        return Ok(mills_pos(x));
    }
    let inv_pdf = if -x >= LOG_SPACE_THRESHOLD {
        let ln_inv_pdf = 0.5 * x * x + LN_SQRT_2PI;
        if ln_inv_pdf > f64::MAX.ln() {
            return Err(Error::MillsOverflow { x });
        }
        ln_inv_pdf.exp()
    } else {
        SQRT_2PI * (0.5 * x * x).exp()
    };
    let value = inv_pdf - mills_pos(-x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::MillsOverflow { x })
    }
}

/// `ln m(x)`, finite for every finite `x`.
pub fn log_mills_ratio(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("x", x, "finite"));
    }
    Ok(ln_mills(x))
}

#[inline]
pub fn ln_norm_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    ln_norm_pdf(x).exp()
}

/// `ln Φ(x)`.
#[inline]
pub fn ln_norm_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x <= 0.0 {
        ln_norm_pdf(x) + mills_pos(-x).ln()
    } else {
        (-(norm_pdf(x) * mills_pos(x))).ln_1p()
    }
}

/// `Φ(x)`.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        norm_pdf(x) * mills_pos(-x)
    } else {
        if x == f64::INFINITY {
            return 1.0;
        }
        1.0 - norm_pdf(x) * mills_pos(x)
    }
}

// Wichura's AS 241 (PPND16) rational approximations.

fn ppnd16_central(q: f64) -> f64 {
    let r = 0.180625 - q * q;
    q * (((((((r * 2509.0809287301227 + 33430.57558358813) * r + 67265.7709270087) * r
        + 45921.95393154987)
        * r
        + 13731.69376550946)
        * r
        + 1971.5909503065513)
        * r
        + 133.14166789178438)
        * r
        + 3.3871328727963665)
        / (((((((r * 5226.495278852546 + 28729.085735721943) * r + 39307.89580009271)
            * r
            + 21213.794301586597)
            * r
            + 5394.196021424751)
            * r
            + 687.1870074920579)
            * r
            + 42.31333070160091)
            * r
            + 1.0)
}

/// `Φ⁻¹(p)` magnitude for a tail probability `p = exp(-r²)`, `r > √(-ln 0.075)`.
fn ppnd16_tail(r: f64) -> f64 {
    if r <= 5.0 {
        let r = r - 1.6;
        (((((((r * 7.745_450_142_783_414e-4 + 0.022_723_844_989_269_184) * r
            + 0.241_780_725_177_450_6)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5)
            / (((((((r * 1.050_750_071_644_416_9e-9 + 5.475_938_084_995_345e-4) * r
                + 0.015_198_666_563_616_457)
                * r
                + 0.148_103_976_427_480_08)
                * r
                + 0.689_767_334_985_1)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_759)
                * r
                + 1.0)
    } else {
        let r = r - 5.0;
        (((((((r * 2.010_334_399_292_288_1e-7 + 2.711_555_568_743_487_6e-5) * r
            + 0.001_242_660_947_388_078_4)
            * r
            + 0.026_532_189_526_576_124)
            * r
            + 0.296_560_571_828_504_9)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103_5)
            / (((((((r * 2.044_263_103_389_939_7e-15 + 1.421_511_758_316_446e-7) * r
                + 1.846_318_317_510_054_8e-5)
                * r
                + 7.868_691_311_456_133e-4)
                * r
                + 0.014_875_361_290_850_615)
                * r
                + 0.136_929_880_922_735_8)
                * r
                + 0.599_832_206_555_888)
                * r
                + 1.0)
    }
}

/// `Φ⁻¹(p)` for `p ∈ [0, 1]`; `±∞` at the end points.
pub fn norm_quantile(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("p", p, "a probability in [0, 1]"));
    }
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        return Ok(ppnd16_central(q));
    }
    if q < 0.0 {
        normal_quantile_from_log(p.ln())
    } else {
        Ok(-normal_quantile_from_log((1.0 - p).ln())?)
    }
}

/// Below this log-probability AS 241 is out of range and the tail is
/// solved by Newton iteration on `ln Φ`.
/// `ln(eˣ + eʸ)` without overflow.
#[inline]
pub(crate) fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(1 + eˣ)`.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

const DEEP_TAIL_LOG_P: f64 = -700.0;

/// `Φ⁻¹(exp(log_p))` for `log_p ≤ 0`.
///
/// Moderate tails use AS 241 with `r = √(-log_p)` taken straight from the
/// log-probability, so nothing is ever exponentiated. Past `log_p = -700`
/// the two-term asymptote `x₀ = -√(-2 log_p - ln(2π x₀²))` is refined by
/// Newton steps on `ln Φ(x) - log_p`, whose derivative is `1/m(-x)`.
pub fn normal_quantile_from_log(log_p: f64) -> Result<f64> {
    if log_p.is_nan() || log_p > 0.0 {
        return Err(Error::domain("log_p", log_p, "non-positive"));
    }
    Ok(quantile_from_log_unchecked(log_p))
}

#[inline]
pub(crate) fn quantile_from_log_unchecked(log_p: f64) -> f64 {
    if log_p == 0.0 {
        return f64::INFINITY;
    }
    if log_p == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    const LN_HALF: f64 = -std::f64::consts::LN_2;
    if log_p >= LN_HALF {
        // upper half: work with the complement 1 - p = -expm1(log_p)
        let p = log_p.exp();
        let q = p - 0.5;
        if q <= 0.425 {
            return ppnd16_central(q);
        }
        let upper = -log_p.exp_m1();
        return ppnd16_tail((-upper.ln()).sqrt());
    }
    if log_p >= DEEP_TAIL_LOG_P {
        let p = log_p.exp();
        let q = p - 0.5;
        if q >= -0.425 {
            return ppnd16_central(q);
        }
        return -ppnd16_tail((-log_p).sqrt());
    }
    deep_lower_tail(log_p)
}

fn deep_lower_tail(log_p: f64) -> f64 {
    let t = -2.0 * log_p;
    let x0 = -t.sqrt();
    let mut x = -(t - (2.0 * std::f64::consts::PI * x0 * x0).ln()).sqrt();
    for _ in 0..8 {
        let step = (ln_norm_cdf(x) - log_p) * mills_pos(-x);
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn coefficient_invariants() {
        assert_eq!(MILLS_RATIONAL.denominator[9], 1.0);
        assert!(MILLS_RATIONAL.numerator[8] > 0.0);
        assert!(MILLS_RATIONAL.denominator[9] > 0.0);
    }

    #[test]
    fn mills_at_zero_is_half_sqrt_2pi() {
        let m0 = mills_ratio_positive(0.0).unwrap();
        assert!(rel(m0, 1.253_314_137_315_500_3) < 1e-13);
        assert_eq!(mills_ratio(0.0).unwrap(), m0);
        assert!(rel(log_mills_ratio(0.0).unwrap(), (0.5 * std::f64::consts::PI).sqrt().ln()) < 1e-12);
    }

    #[test]
    fn asymptotic_branch() {
        assert_eq!(mills_ratio_positive(1e40).unwrap(), 1e-40);
        assert!(mills_ratio_positive(1.75e34).unwrap() == 1.0 / 1.75e34);
    }

    #[test]
    fn mills_reference_points() {
        // mpmath, 50 digits
        assert!(rel(mills_ratio_positive(1.0).unwrap(), 0.655_679_542_418_798_5) < 1e-12);
        assert!(rel(mills_ratio(-1.0).unwrap(), 3.477_051_811_703_694_5) < 1e-12);
        assert!(rel(mills_ratio(-5.0).unwrap(), 672_621.636_722_879_3) < 1e-12);
        assert!(rel(mills_ratio(-20.0).unwrap(), 1.811_283_015_892_591_6e87) < 1e-12);
        assert!(rel(log_mills_ratio(-50.0).unwrap(), 1_250.918_938_533_204_7) < 1e-12);
        assert!(rel(log_mills_ratio(600.0).unwrap(), -6.396_932_432_974_634) < 1e-12);
        assert!(rel(log_mills_ratio(-37.5).unwrap(), 704.043_938_533_204_7) < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(mills_ratio_positive(-1.0).is_err());
        assert!(mills_ratio_positive(f64::NAN).is_err());
        assert!(mills_ratio_positive(f64::INFINITY).is_err());
        assert!(mills_ratio(f64::NAN).is_err());
        assert!(log_mills_ratio(f64::NEG_INFINITY).is_err());
        assert!(normal_quantile_from_log(0.1).is_err());
        assert!(norm_quantile(1.5).is_err());
    }

    #[test]
    fn overflow_is_flagged_beyond_the_double_range() {
        assert!(mills_ratio(-37.0).unwrap().is_finite());
        assert!(matches!(mills_ratio(-40.0), Err(Error::MillsOverflow { .. })));
        assert!(log_mills_ratio(-40.0).unwrap().is_finite());
    }

    #[test]
    fn negative_tail_limit() {
        // m(x) φ(x) = 1 - Φ(x) → 1 as x → -∞
        for x in [-8.0, -15.0, -30.0, -36.9] {
            let prod = mills_ratio(x).unwrap() * norm_pdf(x);
            assert!((prod - 1.0).abs() < 1e-12, "x = {x}: {prod}");
        }
    }

    #[test]
    fn strictly_decreasing_on_wide_grid() {
        let n = 5000;
        let mut prev = f64::INFINITY;
        for i in 0..=n {
            let x = -30.0 + 630.0 * i as f64 / n as f64;
            let m = mills_ratio(x).unwrap();
            assert!(m > 0.0 && m < prev, "not decreasing at {x}");
            prev = m;
        }
    }

    #[test]
    fn reflection_identity() {
        // m(x) = 1/φ(x) - m(-x), checked in the cancellation-free form
        // m(x) + m(-x) = 1/φ(x)
        for i in 0..=160 {
            let x = -8.0 + 0.1 * i as f64;
            let lhs = mills_ratio(x).unwrap() + mills_ratio(-x).unwrap();
            assert!(rel(lhs, 1.0 / norm_pdf(x)) < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn log_mills_agrees_with_direct_where_finite() {
        for i in 0..=400 {
            let x = -37.0 + 0.5 * i as f64;
            let direct = mills_ratio(x).unwrap().ln();
            let logged = log_mills_ratio(x).unwrap();
            assert!((direct - logged).abs() <= 1e-10 * direct.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn quantile_reference_points() {
        // mpmath values
        let cases = [
            (1e-20, -9.262_340_089_798_408),
            (1e-5, -4.264_890_793_922_825),
            (0.025, -1.959_963_984_540_054),
            (0.3, -0.524_400_512_708_040_8),
            (0.75, 0.674_489_750_196_081_7),
            (0.999, 3.090_232_306_167_813_3),
        ];
        for (p, z) in cases {
            assert!(rel(norm_quantile(p).unwrap(), z) < 1e-14, "p = {p}");
            assert!(rel(normal_quantile_from_log(p.ln()).unwrap(), z) < 1e-13, "p = {p}");
        }
        assert_eq!(normal_quantile_from_log(0.5f64.ln()).unwrap().abs() < 1e-16, true);
        assert_eq!(norm_quantile(0.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(norm_quantile(1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn quantile_from_log_deep_tail() {
        assert!(rel(normal_quantile_from_log(-53.231_285_150_512_47).unwrap(), -10.0) < 1e-12);
        // roots of ln Φ(x) = log_p (mpmath findroot at 50 digits)
        let roots = [
            (-1.0, -0.337_474_963_764_202_45),
            (-10.0, -3.913_946_240_531_893),
            (-100.0, -13.888_476_033_003_886),
            (-5000.0, -99.944_748_174_841_09),
            (-1e4, -141.379_839_873_127_16),
            (-1e6, -1_414.207_782_991_017_3),
            (-1e8, -14_142.134_882_976_3),
        ];
        for (lp, x) in roots {
            assert!(rel(normal_quantile_from_log(lp).unwrap(), x) < 1e-12, "log_p = {lp}");
        }
    }

    #[test]
    fn log_quantile_round_trip() {
        for lp in [-1.0, -10.0, -100.0, -1e4, -1e6, -650.0, -700.0, -701.0, -2e-3, -1e-9] {
            let x = normal_quantile_from_log(lp).unwrap();
            assert!(rel(ln_norm_cdf(x), lp) < 1e-8, "log_p = {lp}");
        }
    }

    #[test]
    fn ln_cdf_matches_cdf() {
        for i in 0..=200 {
            let x = -20.0 + 0.2 * i as f64;
            assert!(rel(ln_norm_cdf(x).exp(), norm_cdf(x)) < 1e-13);
        }
        assert!(rel(ln_norm_cdf(-10.0), -53.231_285_150_512_47) < 1e-14);
    }
}
