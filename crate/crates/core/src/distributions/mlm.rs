//! The Modified Lomax distribution.
//!
//! With `w = ln(1 + x/σ)` the survival function is
//!
//! ```text
//! S(x) = exp(−α · w^(β+1) / (1 + w)^β),   x > 0
//! ```
//!
//! and the density is
//!
//! ```text
//! f(x) = α (β + 1 + w) w^β / (σ (1 + x/σ) (1 + w)^(β+1)) · S(x).
//! ```
//!
//! Setting `β = 0` gives the Lomax survival `(1 + x/σ)^(−α)`. All evaluation
//! goes through `ln S`, which stays finite for any `x` representable as f64.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const QUANTILE_MAX_ITER: usize = 200;
const QUANTILE_TOL: f64 = 1e-14;

/// Parameters `(α, β, σ)` of the Modified Lomax distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct MlmParams {
    alpha: f64,
    beta: f64,
    sigma: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    sigma: f64,
}

impl TryFrom<RawParams> for MlmParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        MlmParams::new(raw.alpha, raw.beta, raw.sigma)
    }
}

impl MlmParams {
    /// Validates `α > 0`, `β > −1`, `σ > 0`, all finite.
    pub fn new(alpha: f64, beta: f64, sigma: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::param(format!("alpha must be positive and finite (got {alpha})")));
        }
        if !beta.is_finite() || beta <= -1.0 {
            return Err(Error::param(format!("beta must exceed -1 (got {beta})")));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::param(format!("sigma must be positive and finite (got {sigma})")));
        }
        Ok(Self { alpha, beta, sigma })
    }

    /// The Lomax special case `β = 0`.
    pub fn lomax(alpha: f64, sigma: f64) -> Result<Self> {
        Self::new(alpha, 0.0, sigma)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `w = ln(1 + x/σ)`.
    #[inline]
    pub fn w(&self, x: f64) -> f64 {
        (x / self.sigma).ln_1p()
    }

    /// `g(w) = w^(β+1) / (1 + w)^β`, the exponent of the survival function
    /// without the factor `α`.
    #[inline]
    pub fn g(&self, w: f64) -> f64 {
        ((self.beta + 1.0) * w.ln() - self.beta * w.ln_1p()).exp()
    }

    /// `ln S(x)` for `x >= 0`; no argument checking.
    #[inline]
    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        -self.alpha * self.g(self.w(x))
    }

    /// `S(x) = 1 − F(x)`; no argument checking.
    pub fn sf(&self, x: f64) -> f64 {
        self.ln_sf(x).exp()
    }

    /// Cumulative distribution function. Errors on negative or non-finite `x`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        Ok(self.cdf_unchecked(x))
    }

    pub(crate) fn cdf_unchecked(&self, x: f64) -> f64 {
        -self.ln_sf(x).exp_m1()
    }

    /// Log-density for `x > 0`; `−∞` elsewhere.
    #[inline]
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) || !x.is_finite() {
            return f64::NEG_INFINITY;
        }
        let w = self.w(x);
        let ln_w = w.ln();
        let ln_1pw = w.ln_1p();
        let b = self.beta;
        let ln_g = (b + 1.0) * ln_w - b * ln_1pw;
        let beta_ln_w = if b == 0.0 { 0.0 } else { b * ln_w };
        self.alpha.ln() + (b + 1.0 + w).ln() + beta_ln_w - self.sigma.ln() - w - (b + 1.0) * ln_1pw
            - self.alpha * ln_g.exp()
    }

    /// Probability density function.
    ///
    /// The support is the open half-line; `pdf(0)` is defined as `0` (for
    /// `β < 0` the density is unbounded as `x → 0+`, and degree data never
    /// contains zero). Negative or non-finite `x` is a domain error.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(self.ln_pdf(x).exp())
    }

    /// Inverse CDF for `u ∈ (0, 1)`.
    ///
    /// Solves `g(w) = −ln(1 − u)/α` in `v = ln w`, where the residual
    /// `(β+1)v − β·ln(1 + e^v) − ln t` has slope between `min(1, β+1)` and
    /// `max(1, β+1)`. That bound gives a guaranteed bracket around any
    /// starting point; safeguarded Newton then converges in a few steps.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1) (got {u})")));
        }
        let target = -(-u).ln_1p() / self.alpha;
        let w = self.solve_g(target)?;
        Ok(self.sigma * w.exp_m1())
    }

    fn solve_g(&self, target: f64) -> Result<f64> {
        let b = self.beta;
        let ln_t = target.ln();
        let resid = |v: f64| (b + 1.0) * v - b * softplus(v) - ln_t;
        let slope = |v: f64| (b + 1.0) - b * sigmoid(v);
        let min_slope = (b + 1.0).min(1.0);

        let mut v = if target <= 1.0 {
            ln_t / (b + 1.0)
        } else {
            (target + b).max(0.5 * target).ln()
        };
        let r0 = resid(v);
        if r0 == 0.0 {
            return Ok(v.exp());
        }
        let reach = r0.abs() / min_slope * (1.0 + 1e-9) + 1e-12;
        let (mut lo, mut hi) = if r0 > 0.0 { (v - reach, v) } else { (v, v + reach) };

        for _ in 0..QUANTILE_MAX_ITER {
            let r = resid(v);
            if r > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            let mut next = v - r / slope(v);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - v).abs() <= QUANTILE_TOL * next.abs().max(1.0) || hi - lo <= QUANTILE_TOL {
                return Ok(next.exp());
            }
            v = next;
        }
        Err(Error::Convergence(format!(
            "quantile solver did not converge for target {target}"
        )))
    }

    /// Inverse-transform sample of size `n >= 1`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidInput("sample size must be at least 1".into()));
        }
        (0..n).map(|_| self.quantile(open_unit(rng))).collect()
    }
}

fn check_x(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!("x must be finite and non-negative (got {x})")));
    }
    Ok(())
}

#[inline]
fn softplus(v: f64) -> f64 {
    if v > 0.0 {
        v + (-v).exp().ln_1p()
    } else {
        v.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// Uniform draw on the open interval (0, 1) with 53 random bits.
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
