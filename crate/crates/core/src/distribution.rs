//! The Lasso distribution, density `∝ exp(-a x²/2 + b x - c|x|)`.
//!
//! For `a > 0` it is a two-component mixture of truncated normals sharing
//! `σ = 1/√a`: a component on `x > 0` centred at `μ₁ = (b - c)/a` and one on
//! `x < 0` centred at `μ₂ = (b + c)/a`. Everything below works from the
//! log-scale Mill's ratios of the two standardized cut points so that no
//! intermediate quantity overflows for extreme parameters.

use rand::Rng;

use crate::error::{Error, Result};
use crate::samplers::{asymmetric_laplace_sample, trunc_normal_moments, uniform_open, Side};
use crate::special::{
    ln_mills, ln_norm_cdf, log_add_exp, quantile_from_log_unchecked, softplus,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoParams {
    a: f64,
    b: f64,
    c: f64,
}

impl LassoParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let reason = if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            Some("parameters must be finite")
        } else if a < 0.0 {
            Some("a must be non-negative")
        } else if c < 0.0 {
            Some("c must be non-negative")
        } else if a == 0.0 && c == 0.0 {
            Some("a and c cannot both be zero")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::InvalidParams { a, b, c, reason }),
            None => Ok(Self { a, b, c }),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    fn require_quadratic(&self) -> Result<()> {
        if self.a > 0.0 {
            Ok(())
        } else {
            Err(Error::ZeroQuadratic {
                b: self.b,
                c: self.c,
            })
        }
    }
}

/// The mixture-of-truncated-normals view of a Lasso law.
///
/// `w` is the mass on `x < 0`. `w` and `one_minus_w` are each computed
/// directly from the log Mill's ratios, so the smaller one keeps full
/// relative precision; the logs are kept too because either weight may
/// underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureRep {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma: f64,
    pub w: f64,
    pub one_minus_w: f64,
    pub ln_w: f64,
    pub ln_one_minus_w: f64,
    pub log_z: f64,
    pub v1: f64,
    pub v2: f64,
}

/// `ln Z(a, b, c)` for `a > 0`, unchecked.
///
/// The positive half-line contributes `m((c - b)/√a)/√a` and the negative
/// half-line `m((c + b)/√a)/√a`. When `|b| > c` one of the two arguments is
/// negative and `ln_mills` evaluates `ln(1/φ(v) - m(-v))` without forming
/// `1/φ(v)`.
fn log_partition(a: f64, b: f64, c: f64) -> f64 {
    let sa = a.sqrt();
    log_add_exp(ln_mills((c - b) / sa), ln_mills((c + b) / sa)) - 0.5 * a.ln()
}

pub fn make_mixture_rep(params: &LassoParams) -> Result<MixtureRep> {
    Ok(Lasso::from_params(*params)?.rep)
}

/// A Lasso law with `a > 0` and the quantities its d/p/q/r surface reuses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lasso {
    params: LassoParams,
    rep: MixtureRep,
    sqrt_a: f64,
    // standardized cut points: Φ(-v_pos) = Φ(μ₁/σ), Φ(-v_neg) = Φ(-μ₂/σ)
    v_pos: f64,
    v_neg: f64,
    ln_cdf_pos: f64,
    ln_cdf_neg: f64,
}

impl Lasso {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::from_params(LassoParams::new(a, b, c)?)
    }

    pub fn from_params(params: LassoParams) -> Result<Self> {
        params.require_quadratic()?;
        let LassoParams { a, b, c } = params;
        let sqrt_a = a.sqrt();
        let v_pos = (c - b) / sqrt_a;
        let v_neg = (c + b) / sqrt_a;
        let ln_m_pos = ln_mills(v_pos);
        let ln_m_neg = ln_mills(v_neg);
        let log_z = log_add_exp(ln_m_pos, ln_m_neg) - sqrt_a.ln();

        // w = m_neg / (m_pos + m_neg) = 1 / (1 + e^d)
        let d = ln_m_pos - ln_m_neg;
        let (w, one_minus_w) = if d > 0.0 {
            let e = (-d).exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        } else {
            let e = d.exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        };

        let rep = MixtureRep {
            mu1: (b - c) / a,
            mu2: (b + c) / a,
            sigma: 1.0 / sqrt_a,
            w,
            one_minus_w,
            ln_w: -softplus(d),
            ln_one_minus_w: -softplus(-d),
            log_z,
            v1: v_pos.min(v_neg),
            v2: v_pos.max(v_neg),
        };
        Ok(Self {
            params,
            rep,
            sqrt_a,
            v_pos,
            v_neg,
            ln_cdf_pos: ln_norm_cdf(-v_pos),
            ln_cdf_neg: ln_norm_cdf(-v_neg),
        })
    }

    pub fn params(&self) -> LassoParams {
        self.params
    }

    pub fn mixture(&self) -> &MixtureRep {
        &self.rep
    }

    pub fn log_z(&self) -> f64 {
        self.rep.log_z
    }

    fn kernel_ln(&self, x: f64) -> f64 {
        let LassoParams { a, b, c } = self.params;
        -0.5 * a * x * x + b * x - c * x.abs()
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain("x", x, "finite"));
        }
        Ok(self.kernel_ln(x) - self.rep.log_z)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.ln_pdf(x)?.exp())
    }

    /// `(ln P(X < x), ln P(X > x))`, one of which is exact and the other
    /// derived from it.
    fn ln_tails(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            let ln_f = self.rep.ln_w + ln_norm_cdf(x * self.sqrt_a - self.v_neg) - self.ln_cdf_neg;
            let ln_f = ln_f.min(0.0);
            (ln_f, ln_1m_exp(ln_f))
        } else {
            let ln_s = self.rep.ln_one_minus_w + ln_norm_cdf(-self.v_pos - x * self.sqrt_a)
                - self.ln_cdf_pos;
            let ln_s = ln_s.min(0.0);
            (ln_1m_exp(ln_s), ln_s)
        }
    }

    pub fn ln_cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::domain("x", x, "not NaN"));
        }
        Ok(match x {
            f64::NEG_INFINITY => f64::NEG_INFINITY,
            f64::INFINITY => 0.0,
            _ => self.ln_tails(x).0,
        })
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::domain("x", x, "not NaN"));
        }
        Ok(match x {
            f64::NEG_INFINITY => 0.0,
            f64::INFINITY => 1.0,
            _ if x <= 0.0 => self.ln_tails(x).0.exp(),
            _ => -self.ln_tails(x).1.exp_m1(),
        }
        .clamp(0.0, 1.0))
    }

    /// `P(X > x)`.
    pub fn sf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::domain("x", x, "not NaN"));
        }
        Ok(match x {
            f64::NEG_INFINITY => 1.0,
            f64::INFINITY => 0.0,
            _ if x <= 0.0 => -self.ln_tails(x).0.exp_m1(),
            _ => self.ln_tails(x).1.exp(),
        }
        .clamp(0.0, 1.0))
    }

    /// Inverse CDF; `0` and `1` map to `-∞` and `+∞`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::domain("u", u, "a probability in [0, 1]"));
        }
        Ok(self.quantile_unchecked(u))
    }

    fn quantile_unchecked(&self, u: f64) -> f64 {
        const LN_HALF: f64 = -std::f64::consts::LN_2;
        if u == 0.0 {
            return f64::NEG_INFINITY;
        }
        if u == 1.0 {
            return f64::INFINITY;
        }
        let rep = &self.rep;
        if u == rep.w {
            return 0.0;
        }
        if u < rep.w {
            // x = μ₂ + σ Φ⁻¹(p) with p = Φ(-μ₂/σ) u / w
            let ln_p = self.ln_cdf_neg + u.ln() - rep.ln_w;
            let z = if ln_p < LN_HALF {
                quantile_from_log_unchecked(ln_p)
            } else {
                // 1 - p = (w - u)/w + (u/w) Φ(μ₂/σ)
                let gap = if rep.w > 0.5 {
                    (1.0 - u) - rep.one_minus_w
                } else {
                    rep.w - u
                };
                let ln_q = log_add_exp(
                    gap.max(0.0).ln() - rep.ln_w,
                    u.ln() - rep.ln_w + ln_norm_cdf(self.v_neg),
                );
                -quantile_from_log_unchecked(ln_q.min(0.0))
            };
            (z + self.v_neg) / self.sqrt_a
        } else {
            // x = μ₁ - σ Φ⁻¹(p) with p = Φ(μ₁/σ) (1 - u)/(1 - w)
            let ln_tail = (-u).ln_1p();
            let ln_p = self.ln_cdf_pos + ln_tail - rep.ln_one_minus_w;
            let z = if ln_p < LN_HALF {
                quantile_from_log_unchecked(ln_p)
            } else {
                let gap = if rep.w > 0.5 {
                    rep.one_minus_w - (1.0 - u)
                } else {
                    u - rep.w
                };
                let ln_q = log_add_exp(
                    gap.max(0.0).ln() - rep.ln_one_minus_w,
                    ln_tail - rep.ln_one_minus_w + ln_norm_cdf(self.v_pos),
                );
                -quantile_from_log_unchecked(ln_q.min(0.0))
            };
            (-self.v_pos - z) / self.sqrt_a
        }
    }

    /// One inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile_unchecked(uniform_open(rng))
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Raw moments `E[X^r]` for `r = 1..=max_order` (at most 4).
    pub fn moments(&self, max_order: usize) -> Result<Vec<f64>> {
        let rep = &self.rep;
        let pos = trunc_normal_moments(rep.mu1, rep.sigma, Side::Positive, max_order)?;
        let neg = trunc_normal_moments(rep.mu2, rep.sigma, Side::Negative, max_order)?;
        Ok(pos
            .iter()
            .zip(neg.iter())
            .map(|(&p, &n)| {
                let mut m = 0.0;
                if rep.one_minus_w > 0.0 {
                    m += rep.one_minus_w * p;
                }
                if rep.w > 0.0 {
                    m += rep.w * n;
                }
                m
            })
            .collect())
    }

    pub fn moment(&self, r: usize) -> Result<f64> {
        if r == 0 {
            return Err(Error::domain("r", 0.0, "a positive integer"));
        }
        Ok(self.moments(r)?[r - 1])
    }

    pub fn mean(&self) -> f64 {
        self.moments(1).expect("order 1 is always valid")[0]
    }

    pub fn variance(&self) -> f64 {
        let m = self.moments(2).expect("order 2 is always valid");
        (m[1] - m[0] * m[0]).max(0.0)
    }

    pub fn ln_mgf(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::domain("t", t, "finite"));
        }
        let LassoParams { a, b, c } = self.params;
        Ok(log_partition(a, b + t, c) - self.rep.log_z)
    }

    pub fn mgf(&self, t: f64) -> Result<f64> {
        Ok(self.ln_mgf(t)?.exp())
    }

    pub fn mode(&self) -> f64 {
        let LassoParams { a, b, c } = self.params;
        let sign = if b > 0.0 {
            1.0
        } else if b < 0.0 {
            -1.0
        } else {
            0.0
        };
        (b.abs() - c).max(0.0) * sign / a
    }

    pub fn exp_family(&self) -> ExpFamilyDecomposition {
        let LassoParams { a, b, c } = self.params;
        ExpFamilyDecomposition {
            natural_params: [-0.5 * a, b, -c],
            log_partition: self.rep.log_z,
        }
    }
}

/// `ln(1 - eˣ)` for `x ≤ 0`.
fn ln_1m_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `p(x) = exp(ν · T(x) - A)` with `T(x) = (x², x, |x|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFamilyDecomposition {
    pub natural_params: [f64; 3],
    pub log_partition: f64,
}

impl ExpFamilyDecomposition {
    pub fn sufficient_stats(x: f64) -> [f64; 3] {
        [x * x, x, x.abs()]
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        let t = Self::sufficient_stats(x);
        let nu = &self.natural_params;
        nu[0] * t[0] + nu[1] * t[1] + nu[2] * t[2] - self.log_partition
    }
}

pub fn lasso_pdf(x: f64, params: &LassoParams, log_scale: bool) -> Result<f64> {
    let dist = Lasso::from_params(*params)?;
    if log_scale {
        dist.ln_pdf(x)
    } else {
        dist.pdf(x)
    }
}

pub fn lasso_cdf(x: f64, params: &LassoParams) -> Result<f64> {
    Lasso::from_params(*params)?.cdf(x)
}

pub fn lasso_quantile(u: f64, params: &LassoParams) -> Result<f64> {
    Lasso::from_params(*params)?.quantile(u)
}

pub fn lasso_sample<R: Rng + ?Sized>(n: usize, params: &LassoParams, rng: &mut R) -> Result<Vec<f64>> {
    Ok(Lasso::from_params(*params)?.sample_n(n, rng))
}

pub fn lasso_moment(r: usize, params: &LassoParams) -> Result<f64> {
    Lasso::from_params(*params)?.moment(r)
}

pub fn lasso_mgf(t: f64, params: &LassoParams) -> Result<f64> {
    Lasso::from_params(*params)?.mgf(t)
}

pub fn lasso_mode(params: &LassoParams) -> Result<f64> {
    Ok(Lasso::from_params(*params)?.mode())
}

pub fn exp_family_decomposition(params: &LassoParams) -> Result<ExpFamilyDecomposition> {
    Ok(Lasso::from_params(*params)?.exp_family())
}

/// One draw for any valid parameters, including the `a = 0` (asymmetric)
/// Laplace limit.
pub fn lasso_draw_any<R: Rng + ?Sized>(params: &LassoParams, rng: &mut R) -> Result<f64> {
    if params.a == 0.0 {
        asymmetric_laplace_sample(params.b, params.c, rng)
    } else {
        Ok(Lasso::from_params(*params)?.sample(rng))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitClass {
    General,
    Normal,
    Laplace,
    AsymmetricLaplace,
    PositiveTruncNormal,
    NegativeTruncNormal,
}

/// Thresholds for [`classify_limit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitTolerances {
    /// Normal when `c σ < normal · (1 + |b| σ)`.
    pub normal: f64,
    /// Truncated normal when the smaller mixture weight is below this.
    pub trunc_mass: f64,
    /// Laplace family when `c > |b|` and `a / max(b², c²)` is below this.
    pub laplace: f64,
}

impl Default for LimitTolerances {
    fn default() -> Self {
        Self {
            normal: 1e-12,
            trunc_mass: 1e-300,
            laplace: 1e-12,
        }
    }
}

pub fn classify_limit(params: &LassoParams, tol: &LimitTolerances) -> Result<LimitClass> {
    let LassoParams { a, b, c } = *params;
    let laplace_kind = if b == 0.0 {
        LimitClass::Laplace
    } else {
        LimitClass::AsymmetricLaplace
    };
    if a == 0.0 {
        if c > b.abs() {
            return Ok(laplace_kind);
        }
        return Err(Error::InvalidParams {
            a,
            b,
            c,
            reason: "with a = 0 the density is only normalizable when c > |b|",
        });
    }
    let sigma = 1.0 / a.sqrt();
    if c * sigma < tol.normal * (1.0 + b.abs() * sigma) {
        return Ok(LimitClass::Normal);
    }
    if c > b.abs() && a / b.powi(2).max(c * c) < tol.laplace {
        return Ok(laplace_kind);
    }
    let rep = Lasso::from_params(*params)?.rep;
    let ln_tol = tol.trunc_mass.ln();
    if rep.ln_w < ln_tol {
        return Ok(LimitClass::PositiveTruncNormal);
    }
    if rep.ln_one_minus_w < ln_tol {
        return Ok(LimitClass::NegativeTruncNormal);
    }
    Ok(LimitClass::General)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;
    use lasso_oracles::{
        integrate, integrate_weighted, ks_critical_01, ks_statistic, mean_and_se,
    };

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn worked_example() -> Lasso {
        Lasso::new(2.0, 1.0, 3.0).unwrap()
    }

    /// Width of the narrowest feature of the kernel, for the quadrature oracle.
    fn scale_of(d: &Lasso) -> f64 {
        let LassoParams { b, c, .. } = d.params();
        let sigma = d.mixture().sigma;
        if c + b.abs() > 0.0 {
            sigma.min(1.0 / (c + b.abs()))
        } else {
            sigma
        }
    }

    fn quad<G: Fn(f64) -> f64>(d: &Lasso, g: G) -> f64 {
        quad_split(d, g, 0.0)
    }

    /// Quadrature with an extra panel boundary at `cut`, for integrands with
    /// a jump there.
    fn quad_split<G: Fn(f64) -> f64>(d: &Lasso, g: G, cut: f64) -> f64 {
        // log-kernel relative to its value at the mode, with the linear
        // coefficient of each half-line (b - c or b + c) formed once, so the
        // integrand carries no cancellation noise when b and c are large
        let LassoParams { a, b, c } = d.params();
        let m = d.mode();
        let slope = |x: f64| if x >= 0.0 { b - c } else { b + c };
        let centred = |x: f64| {
            if (x >= 0.0) == (m >= 0.0) {
                let dx = x - m;
                dx * (slope(x) - a * m - 0.5 * a * dx)
            } else {
                x * (slope(x) - 0.5 * a * x) - m * (slope(m) - 0.5 * a * m)
            }
        };
        let (val, shift) = integrate_weighted(centred, g, m, scale_of(d), &[0.0, cut], 1e-11);
        val * (shift + d.kernel_ln(m) - d.log_z()).exp()
    }

    #[test]
    fn printed_cdf_value() {
        let p = worked_example().cdf(-1.0).unwrap();
        assert!((p - 0.00176594).abs() <= 5e-8);
        assert!(rel(p, 0.001_765_939_836_5) < 1e-10);
    }

    #[test]
    fn printed_quantiles() {
        let d = worked_example();
        let expected = [
            (0.1, -0.28183916, -0.281_839_157_443),
            (0.3, -0.04935763, -0.049_357_632_695_3),
            (0.6, 0.16137104, 0.161_371_040_339),
        ];
        for (u, printed, precise) in expected {
            let q = d.quantile(u).unwrap();
            assert!((q - printed).abs() <= 5e-8, "{u}: {q}");
            assert!((q - precise).abs() <= 1e-11, "{u}: {q}");
        }
    }

    #[test]
    fn weights_and_partition_against_high_precision() {
        // mpmath, 40 digits
        let cases = [
            ((2.0, 1.0, 3.0), 0.373_943_535_456_229_5, 0.626_056_464_543_770_5, -0.502_073_034_570_484_2),
            ((1.0, -4.0, 1.0), 0.999_145_080_178_542_5, 8.549_198_214_575_524e-4, 5.418_443_008_713_75),
        ];
        for ((a, b, c), w, omw, log_z) in cases {
            let rep = *Lasso::new(a, b, c).unwrap().mixture();
            assert!(rel(rep.w, w) < 1e-12, "{}", rep.w);
            assert!(rel(rep.one_minus_w, omw) < 1e-12, "{}", rep.one_minus_w);
            assert!(rel(rep.log_z, log_z) < 1e-12, "{}", rep.log_z);
            assert!(rel(rep.ln_w.exp(), w) < 1e-12);
            assert!(rel(rep.ln_one_minus_w.exp(), omw) < 1e-12);
        }
        let rep = *Lasso::new(100.0, 50.0, 200.0).unwrap().mixture();
        assert!(rel(rep.w, 0.375_657_056_646_043_15) < 1e-12);
    }

    #[test]
    fn negative_mass_matches_quadrature() {
        let d = Lasso::new(1.0, -4.0, 1.0).unwrap();
        let neg = quad(&d, |x| if x < 0.0 { 1.0 } else { 0.0 });
        let pos = quad(&d, |x| if x > 0.0 { 1.0 } else { 0.0 });
        let rep = d.mixture();
        assert!(rel(rep.w, neg) < 1e-10);
        assert!(rel(rep.one_minus_w, pos) < 1e-9);
        assert!(rep.w > 0.0 && rep.w < 1.0 && rep.one_minus_w > 0.0 && rep.one_minus_w < 1.0);
    }

    #[test]
    fn rep_invariants() {
        for (a, b, c) in [(2.0, 1.0, 3.0), (1.0, -4.0, 1.0), (0.5, 7.0, 0.0), (3.0, 0.0, 2.0)] {
            let rep = *Lasso::new(a, b, c).unwrap().mixture();
            assert!(rep.mu1 <= rep.mu2);
            assert!(rep.v2 >= 0.0 && rep.v2 >= rep.v1);
            assert_eq!(rep.v1 >= 0.0, b.abs() <= c);
            assert!((rep.w + rep.one_minus_w - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn vanishing_penalty_gives_gaussian_partition() {
        let d = Lasso::new(1.0, 0.0, 1e-300).unwrap();
        assert!((d.log_z() - (2.0 * std::f64::consts::PI).sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn pdf_at_origin_and_gaussian_case() {
        let d = worked_example();
        assert!(rel(d.pdf(0.0).unwrap(), (-d.log_z()).exp()) < 1e-15);

        let g = Lasso::new(2.0, 1.0, 0.0).unwrap();
        for i in -40..=40 {
            let x = i as f64 * 0.1;
            let normal = (-(x - 0.5).powi(2)).exp() / std::f64::consts::PI.sqrt();
            assert!(rel(g.pdf(x).unwrap(), normal) < 1e-12, "{x}");
        }
        assert!(d.pdf(f64::NAN).is_err());
        assert!(d.ln_pdf(f64::INFINITY).is_err());
    }

    #[test]
    fn normalization_sweep() {
        for a in [1e-2, 1.0, 1e3] {
            for b in [-50.0, 0.0, 50.0] {
                for c in [0.0, 1.0, 50.0] {
                    let d = Lasso::new(a, b, c).unwrap();
                    let total = quad(&d, |_| 1.0);
                    assert!((total - 1.0).abs() < 1e-8, "({a},{b},{c}): {total}");
                }
            }
        }
    }

    #[test]
    fn integral_over_finite_window() {
        let d = worked_example();
        let f = |x: f64| d.pdf(x).unwrap();
        let total = integrate(f, -30.0, 0.0, 1e-13) + integrate(f, 0.0, 30.0, 1e-13);
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn reflection_symmetry() {
        for (a, b, c) in [(2.0, 1.0, 3.0), (0.3, -4.0, 1.0), (10.0, 25.0, 2.0)] {
            let d = Lasso::new(a, b, c).unwrap();
            let r = Lasso::new(a, -b, c).unwrap();
            for i in -30..=30 {
                let x = i as f64 * 0.37;
                let (l, m) = (d.ln_pdf(x).unwrap(), r.ln_pdf(-x).unwrap());
                assert!((l - m).abs() <= 1e-12 * l.abs().max(1.0));
                assert!((d.cdf(x).unwrap() - r.sf(-x).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn far_left_tail_in_log_space() {
        // mpmath: ln P(X < -50) for (2, 1, 3)
        let ln_p = worked_example().ln_cdf(-50.0).unwrap();
        assert!(rel(ln_p, -2_704.142_502_690_411) < 1e-12, "{ln_p}");
        assert_eq!(worked_example().cdf(-50.0).unwrap(), 0.0);
    }

    #[test]
    fn cdf_at_origin_is_w() {
        for (a, b, c) in [(2.0, 1.0, 3.0), (1.0, -4.0, 1.0), (5.0, 3.0, 0.5)] {
            let d = Lasso::new(a, b, c).unwrap();
            assert!(rel(d.cdf(0.0).unwrap(), d.mixture().w) < 1e-15);
            assert_eq!(d.quantile(d.mixture().w).unwrap(), 0.0);
        }
    }

    #[test]
    fn cdf_matches_quadrature() {
        let d = Lasso::new(1.0, -4.0, 1.0).unwrap();
        for x in [-7.0, -3.0, -0.5, 0.4, 1.5] {
            let below = quad_split(&d, |t| if t < x { 1.0 } else { 0.0 }, x);
            assert!(rel(d.cdf(x).unwrap(), below) < 1e-9, "{x}");
        }
    }

    #[test]
    fn quantile_round_trip() {
        let us = [1e-12, 1e-6, 0.5, 1.0 - 1e-6, 1.0 - 1e-12];
        for (a, b, c) in [
            (2.0, 1.0, 3.0),
            (1.0, -4.0, 1.0),
            (0.01, 30.0, 0.5),
            (400.0, -2.0, 60.0),
            (1.0, 100.0, 1.0),
            (1.0, -100.0, 1.0),
        ] {
            let d = Lasso::new(a, b, c).unwrap();
            for u in us {
                let x = d.quantile(u).unwrap();
                assert!(x.is_finite());
                let back = d.cdf(x).unwrap();
                assert!((back - u).abs() <= 1e-10, "({a},{b},{c}) u = {u}: {back}");
            }
        }
    }

    #[test]
    fn quantile_domain() {
        let d = worked_example();
        assert_eq!(d.quantile(0.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(d.quantile(1.0).unwrap(), f64::INFINITY);
        assert!(d.quantile(1.5).is_err());
        assert!(d.quantile(f64::NAN).is_err());
    }

    #[test]
    fn moments_against_high_precision() {
        let expected = [
            0.121_830_606_368_688_52,
            0.143_616_598_357_144_9,
            0.070_023_720_647_554_69,
            0.094_467_806_886_018_16,
        ];
        let m = worked_example().moments(4).unwrap();
        for (g, e) in m.iter().zip(expected.iter()) {
            assert!(rel(*g, *e) < 1e-11, "{g} vs {e}");
        }
        assert!(worked_example().moment(0).is_err());
        assert!(worked_example().moment(5).is_err());
    }

    #[test]
    fn trivial_moments() {
        assert!(Lasso::new(2.0, 0.0, 3.0).unwrap().moment(1).unwrap().abs() < 1e-15);
        assert!((Lasso::new(2.0, 1.0, 0.0).unwrap().moment(1).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn moments_match_quadrature() {
        for (a, b, c) in [(2.0, 1.0, 3.0), (1.0, -4.0, 1.0), (0.2, 3.0, 0.1)] {
            let d = Lasso::new(a, b, c).unwrap();
            let m = d.moments(2).unwrap();
            let q1 = quad(&d, |x| x);
            let q2 = quad(&d, |x| x * x);
            assert!(rel(m[0], q1) < 1e-8, "({a},{b},{c}) {} vs {q1}", m[0]);
            assert!(rel(m[1], q2) < 1e-8);
        }
    }

    #[test]
    fn mgf_values() {
        let d = worked_example();
        assert_eq!(d.mgf(0.0).unwrap(), 1.0);
        assert!(rel(d.mgf(0.5).unwrap(), 1.080_596_381_747_246_4) < 1e-12);
        assert!(rel(d.mgf(0.5).unwrap(), quad(&d, |x| (0.5 * x).exp())) < 1e-9);
        let g = Lasso::new(2.0, 1.0, 0.0).unwrap();
        let t: f64 = 0.3;
        assert!(rel(g.mgf(t).unwrap(), (0.5 * t + 0.25 * t * t).exp()) < 1e-13);
    }

    #[test]
    fn mgf_derivative_is_mean() {
        let h = 1e-5;
        for (a, b, c) in [(2.0, 1.0, 3.0), (1.0, -4.0, 1.0), (0.5, 2.0, 0.2)] {
            let d = Lasso::new(a, b, c).unwrap();
            let slope = (d.mgf(h).unwrap() - d.mgf(-h).unwrap()) / (2.0 * h);
            assert!(rel(slope, d.mean()) < 1e-4);
        }
    }

    #[test]
    fn modes() {
        assert_eq!(worked_example().mode(), 0.0);
        assert_eq!(Lasso::new(1.0, 3.0, 1.0).unwrap().mode(), 2.0);
        let d = Lasso::new(2.0, -5.0, 1.0).unwrap();
        let step = 1e-3;
        let best = (-5000..=5000)
            .map(|i| i as f64 * step)
            .max_by(|x, y| d.pdf(*x).unwrap().partial_cmp(&d.pdf(*y).unwrap()).unwrap())
            .unwrap();
        assert!((best - d.mode()).abs() <= step);
        assert!((d.mode() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn exp_family_reconstruction() {
        let d = worked_example();
        let ef = d.exp_family();
        assert_eq!(ef.natural_params, [-1.0, 1.0, -3.0]);
        assert_eq!(ef.log_partition, d.log_z());
        for x in [-2.0, 0.0, 1.5] {
            assert!(rel(ef.ln_density(x).exp(), d.pdf(x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn sampling_mean_and_ks() {
        let d = worked_example();
        let mut rng = RngStream::new(2024);
        let xs = d.sample_n(100_000, &mut rng);
        let (m, se) = mean_and_se(&xs);
        assert!((m - d.mean()).abs() <= 4.0 * se);
        let stat = ks_statistic(&xs, |x| d.cdf(x).unwrap());
        assert!(stat < ks_critical_01(xs.len()), "D = {stat}");
        assert!(d.sample_n(0, &mut rng).is_empty());
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = worked_example();
        let a = d.sample_n(50, &mut RngStream::new(5));
        let b = d.sample_n(50, &mut RngStream::new(5));
        assert_eq!(a, b);
    }

    #[test]
    fn stability_sweep() {
        let us: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        for a in [1e-6, 1e-3, 1.0, 1e3, 1e6] {
            for b in [-1e4, -1.0, 0.0, 1.0, 1e4] {
                for c in [0.0, 1.0, 1e4] {
                    let d = Lasso::new(a, b, c).unwrap();
                    let lo = d.quantile(1e-9).unwrap();
                    let hi = d.quantile(1.0 - 1e-9).unwrap();
                    assert!(lo.is_finite() && hi.is_finite() && lo <= hi, "({a},{b},{c})");
                    let mut prev = 0.0;
                    for i in 0..1000 {
                        let x = lo + (hi - lo) * i as f64 / 999.0;
                        let f = d.cdf(x).unwrap();
                        assert!(f.is_finite() && f >= prev, "({a},{b},{c}) x = {x}: {f} < {prev}");
                        prev = f;
                    }
                    let mut prev = f64::NEG_INFINITY;
                    for &u in &us {
                        let x = d.quantile(u).unwrap();
                        assert!(x.is_finite() && x >= prev, "({a},{b},{c}) u = {u}");
                        prev = x;
                    }
                }
            }
        }
    }

    #[test]
    fn zero_quadratic_is_rejected_by_the_surface() {
        let p = LassoParams::new(0.0, 0.5, 1.0).unwrap();
        assert!(matches!(Lasso::from_params(p), Err(Error::ZeroQuadratic { .. })));
        assert!(matches!(lasso_cdf(0.0, &p), Err(Error::ZeroQuadratic { .. })));
        let mut rng = RngStream::new(1);
        assert!(lasso_draw_any(&p, &mut rng).unwrap().is_finite());
    }

    #[test]
    fn invalid_params() {
        assert!(LassoParams::new(0.0, 1.0, 0.0).is_err());
        assert!(LassoParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(LassoParams::new(1.0, 1.0, -1.0).is_err());
        assert!(LassoParams::new(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn limit_classes() {
        let tol = LimitTolerances::default();
        let class = |a, b, c| classify_limit(&LassoParams::new(a, b, c).unwrap(), &tol).unwrap();
        assert_eq!(class(1.0, 0.0, 0.0), LimitClass::Normal);
        assert_eq!(class(1.0, 0.0, 1e-300), LimitClass::Normal);
        assert_eq!(class(0.0, 0.0, 1.0), LimitClass::Laplace);
        assert_eq!(class(0.0, 0.5, 1.0), LimitClass::AsymmetricLaplace);
        assert_eq!(class(1e-20, 0.0, 1.0), LimitClass::Laplace);
        assert_eq!(class(1.0, 100.0, 1.0), LimitClass::PositiveTruncNormal);
        assert_eq!(class(1.0, -100.0, 1.0), LimitClass::NegativeTruncNormal);
        assert_eq!(class(2.0, 1.0, 3.0), LimitClass::General);
        assert!(Lasso::new(1.0, 100.0, 1.0).unwrap().cdf(0.0).unwrap() < 1e-300);
        assert!(classify_limit(&LassoParams::new(0.0, 2.0, 1.0).unwrap(), &tol).is_err());
    }
}
