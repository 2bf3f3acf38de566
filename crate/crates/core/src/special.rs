//! Special functions.
//!
//! The upper incomplete gamma function is needed for arbitrary real shape
//! `a` (the power law with exponential cutoff uses `Γ(1 − α, λ·xmin)` and
//! `α` is routinely larger than one), which the usual library routines do
//! not cover. Everything else is delegated to `statrs`.

use std::f64::consts::SQRT_2;

pub use statrs::function::gamma::ln_gamma;

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// `ln Γ(a, x)` for any real `a` and `x > 0`.
///
/// Returns `NaN` for `x <= 0` or non-finite input.
pub fn ln_upper_gamma(a: f64, x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() || !a.is_finite() {
        return f64::NAN;
    }
    if a > 0.0 && x < a + 1.0 {
        // Γ(a, x) = Γ(a)·(1 − P(a, x)); P is small enough here that the
        // complement keeps full relative precision.
        let p = lower_series_regularized(a, x);
        return ln_gamma(a) + (-p).ln_1p();
    }
    if x >= 1.0 {
        return ln_upper_continued_fraction(a, x);
    }
    // a <= 0 and 0 < x < 1: Γ(a, x) = Γ(a, 1) + ∫_x^1 t^{a-1} e^{-t} dt.
    let head = ln_upper_continued_fraction(a, 1.0).exp();
    let ln_x = x.ln();
    let mut sum = 0.0;
    let mut inv_fact = 1.0;
    let mut k = 0usize;
    loop {
        let c = a + k as f64;
        let integral = if c == 0.0 {
            -ln_x
        } else {
            -(c * ln_x).exp_m1() / c
        };
        let term = inv_fact * integral;
        let signed = if k.is_multiple_of(2) { term } else { -term };
        sum += signed;
        if c > 0.0 && term.abs() <= EPS * sum.abs() {
            break;
        }
        k += 1;
        inv_fact /= k as f64;
        if k > MAX_ITER {
            break;
        }
    }
    (head + sum).ln()
}

/// Upper incomplete gamma `Γ(a, x)` (not regularized).
pub fn upper_gamma(a: f64, x: f64) -> f64 {
    ln_upper_gamma(a, x).exp()
}

/// Regularized lower incomplete gamma `P(a, x)` by its power series, `a > 0`.
fn lower_series_regularized(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum.ln() - x + a * x.ln() - ln_gamma(a)).exp()
}

/// `ln Γ(a, x)` by the Legendre continued fraction (modified Lentz).
/// Valid for any real `a`; converges quickly once `x` is not small.
fn ln_upper_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / nonzero(b);
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = 1.0 / nonzero(an * d + b);
        c = nonzero(b + an / c);
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    -x + a * x.ln() + h.ln()
}

fn nonzero(v: f64) -> f64 {
    if v.abs() < TINY {
        TINY
    } else {
        v
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / SQRT_2)
}

/// Standard normal upper tail `1 − Φ(z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(z / SQRT_2)
}

/// Standard normal quantile `Φ⁻¹(p)` for `p ∈ (0, 1)`.
pub fn normal_quantile(p: f64) -> f64 {
    -SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p)
}

/// `P(X >= k)` for `X ~ Poisson(lambda)`.
pub fn poisson_sf_inclusive(k: u64, lambda: f64) -> f64 {
    if k == 0 {
        1.0
    } else {
        statrs::function::gamma::gamma_lr(k as f64, lambda)
    }
}

/// `ln P(X = k)` for `X ~ Poisson(lambda)`.
pub fn poisson_ln_pmf(k: u64, lambda: f64) -> f64 {
    let k = k as f64;
    k * lambda.ln() - lambda - ln_gamma(k + 1.0)
}
