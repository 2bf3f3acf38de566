//! Log-likelihood, score and Hessian of the Modified Lomax model.
//!
//! Per observation, with `w = ln(1 + x/σ)`, `t = β + 1 + w` and
//! `g = w^(β+1) / (1 + w)^β`,
//!
//! ```text
//! ℓ_i = ln α − ln(σ + x) + ln t + β ln w − (β + 1) ln(1 + w) − α g.
//! ```
//!
//! Derivatives in `σ` go through `w`: `∂w/∂σ = −x / (σ(σ + x))`.

use nalgebra::{Matrix3, Vector3};

use super::sample::Sample;
use crate::distributions::MlmParams;
use crate::error::{Error, Result};

/// Value, gradient and (optionally) Hessian of a single observation.
struct ObsTerms {
    value: f64,
    grad: [f64; 3],
    hess: [[f64; 3]; 3],
}

fn obs_terms(p: &MlmParams, x: f64, with_hessian: bool) -> ObsTerms {
    let (a, b, s) = (p.alpha(), p.beta(), p.sigma());
    let w = (x / s).ln_1p();
    let ln_w = w.ln();
    let ln_1pw = w.ln_1p();
    let t = b + 1.0 + w;
    let g = ((b + 1.0) * ln_w - b * ln_1pw).exp();
    let l = ln_w - ln_1pw;
    let beta_ln_w = if b == 0.0 { 0.0 } else { b * ln_w };

    let value = a.ln() - s.ln() - w + t.ln() + beta_ln_w - (b + 1.0) * ln_1pw - a * g;

    // d/dw of the w-dependent terms other than −α g, and of g itself.
    let a_w = 1.0 / t + b / w - (b + 1.0) / (1.0 + w);
    let g_w = g * t / (w * (1.0 + w));
    let w_s = -x / (s * (s + x));

    let grad = [
        1.0 / a - g,
        1.0 / t + l - a * g * l,
        -1.0 / (s + x) + (a_w - a * g_w) * w_s,
    ];

    let mut hess = [[0.0; 3]; 3];
    if with_hessian {
        let inv_t2 = 1.0 / (t * t);
        let a_ww = -inv_t2 - b / (w * w) + (b + 1.0) / ((1.0 + w) * (1.0 + w));
        let g_ww = g_w * a_w;
        let a_wb = -inv_t2 + 1.0 / (w * (1.0 + w));
        let g_wb = g_w * (l + 1.0 / t);
        let w_ss = x * (2.0 * s + x) / (s * s * (s + x) * (s + x));

        hess[0][0] = -1.0 / (a * a);
        hess[0][1] = -g * l;
        hess[0][2] = -g_w * w_s;
        hess[1][1] = -inv_t2 - a * g * l * l;
        hess[1][2] = (a_wb - a * g_wb) * w_s;
        hess[2][2] = 1.0 / ((s + x) * (s + x)) + (a_ww - a * g_ww) * w_s * w_s + (a_w - a * g_w) * w_ss;
        hess[1][0] = hess[0][1];
        hess[2][0] = hess[0][2];
        hess[2][1] = hess[1][2];
    }
    ObsTerms { value, grad, hess }
}

/// Weighted totals of [`obs_terms`] over a sample.
pub(crate) struct Totals {
    pub value: f64,
    pub grad: Vector3<f64>,
    pub hess: Matrix3<f64>,
}

pub(crate) fn totals(s: &Sample, p: &MlmParams, with_hessian: bool) -> Totals {
    let mut value = 0.0;
    let mut grad = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    for (x, wt) in s.iter() {
        let o = obs_terms(p, x, with_hessian);
        value += wt * o.value;
        for (g, og) in grad.iter_mut().zip(o.grad) {
            *g += wt * og;
        }
        if with_hessian {
            for (row, orow) in hess.iter_mut().zip(o.hess) {
                for (h, oh) in row.iter_mut().zip(orow) {
                    *h += wt * oh;
                }
            }
        }
    }
    // The α–α entry does not depend on the data.
    if with_hessian {
        hess[0][0] = -(s.n() as f64) / (p.alpha() * p.alpha());
    }
    Totals {
        value,
        grad: Vector3::from(grad),
        hess: Matrix3::from_fn(|i, j| hess[i][j]),
    }
}

/// Log-likelihood `Σ ℓ_i`; `−∞` when a term is out of support.
pub fn mlm_loglik(s: &Sample, p: &MlmParams) -> f64 {
    let v = totals(s, p, false).value;
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Score vector `(∂ℓ/∂α, ∂ℓ/∂β, ∂ℓ/∂σ)`.
pub fn mlm_score(s: &Sample, p: &MlmParams) -> Result<Vector3<f64>> {
    let g = totals(s, p, false).grad;
    if g.iter().all(|v| v.is_finite()) {
        Ok(g)
    } else {
        Err(Error::Evaluation(format!("score is not finite at {p:?}")))
    }
}

/// Hessian of the log-likelihood in `(α, β, σ)`.
pub fn mlm_hessian(s: &Sample, p: &MlmParams) -> Result<Matrix3<f64>> {
    let h = totals(s, p, true).hess;
    if h.iter().all(|v| v.is_finite()) {
        Ok(h)
    } else {
        Err(Error::Evaluation(format!("Hessian is not finite at {p:?}")))
    }
}

/// Observed information: the negated Hessian. `F[0][0]` is exactly `n/α²`.
pub fn observed_information(s: &Sample, p: &MlmParams) -> Result<Matrix3<f64>> {
    mlm_hessian(s, p).map(|h| -h)
}
