//! Maximum-likelihood fits for every supported family.
//!
//! Closed forms are used where they exist; the Lomax fit maximizes the
//! profile likelihood over `ln σ` and the power law with cutoff runs L-BFGS
//! over `(α, ln λ)`. Covariances come from a central-difference Hessian in
//! the natural parameters; parameters pinned to the sample minimum (`xmin`,
//! `xm`) are treated as fixed and get zero variance.

use super::fit::{fit_mlm, FitOptions, FitResult, FitState};
use super::intervals::{numeric_gradient, numeric_hessian};
use super::lomax::maximize_profile;
use super::sample::Sample;
use crate::distributions::{DistributionModel, Family, MlmParams};
use crate::error::{Error, Result};
use crate::optim::{minimize, LbfgsOptions};
use crate::special::ln_upper_gamma;

/// Relative step for the numeric Hessian behind competitor covariances.
const HESSIAN_STEP: f64 = 1e-4;

/// `Σ w_i ln f(x_i)` under any model.
pub fn model_loglik(s: &Sample, model: &DistributionModel) -> f64 {
    s.weighted_sum(|x| model.ln_pdf(x))
}

fn build(family: Family, v: &[f64]) -> Option<DistributionModel> {
    let m = match family {
        Family::Mlm => DistributionModel::Mlm(MlmParams::new(v[0], v[1], v[2]).ok()?),
        Family::Lomax => DistributionModel::lomax(v[0], v[1]).ok()?,
        Family::PowerLaw => DistributionModel::power_law(v[0], v[1]).ok()?,
        Family::Pareto => DistributionModel::pareto(v[0], v[1]).ok()?,
        Family::LogNormal => DistributionModel::log_normal(v[0], v[1]).ok()?,
        Family::Exponential => DistributionModel::exponential(v[0]).ok()?,
        Family::PowerLawCutoff => DistributionModel::power_law_cutoff(v[0], v[1], v[2]).ok()?,
        Family::Poisson => DistributionModel::poisson(v[0]).ok()?,
    };
    Some(m)
}

fn fixed_mask(family: Family) -> Vec<bool> {
    family
        .param_names()
        .iter()
        .map(|&n| n == "xmin" || n == "xm")
        .collect()
}

/// Wraps a fitted competitor: numeric score norm, observed information and
/// intervals.
fn finish(
    s: &Sample,
    model: DistributionModel,
    converged: bool,
    iterations: usize,
    message: Option<String>,
    opts: &FitOptions,
) -> FitResult {
    let family = model.family();
    let params = model.param_values();
    let fixed = fixed_mask(family);
    let ll = |v: &[f64]| build(family, v).map_or(f64::NEG_INFINITY, |m| model_loglik(s, &m));
    let loglik = model_loglik(s, &model);
    let grad_norm = numeric_gradient(ll, &params, &fixed, 1e-6)
        .iter()
        .fold(0.0, |m: f64, v| m.max(v.abs()));
    let info = -numeric_hessian(ll, &params, &fixed, HESSIAN_STEP);
    let info = info.iter().all(|v| v.is_finite()).then_some(info);
    FitResult::assemble(
        s,
        model,
        loglik,
        FitState {
            converged,
            iterations,
            grad_norm,
            message,
        },
        info,
        opts.ci_level,
    )
}

fn closed_form(s: &Sample, model: Result<DistributionModel>, opts: &FitOptions) -> Result<FitResult> {
    let model = model.map_err(|e| Error::DegenerateSample(format!("closed-form estimate is invalid: {e}")))?;
    Ok(finish(s, model, true, 0, None, opts))
}

fn reject_constant(s: &Sample, family: Family) -> Result<()> {
    if s.is_constant() {
        return Err(Error::DegenerateSample(format!(
            "all observations are equal; {family} is not identifiable"
        )));
    }
    Ok(())
}

/// Fits `family` to the sample. MLM fits start from `(1, 0, 1)`.
pub fn fit_model(s: &Sample, family: Family, opts: &FitOptions) -> Result<FitResult> {
    let n = s.n() as f64;
    match family {
        Family::Mlm => fit_mlm(s, &MlmParams::new(1.0, 0.0, 1.0)?, opts),
        Family::Exponential => closed_form(s, DistributionModel::exponential(1.0 / s.mean()), opts),
        Family::Poisson => closed_form(s, DistributionModel::poisson(s.mean()), opts),
        Family::LogNormal => {
            reject_constant(s, family)?;
            let mu = s.weighted_sum(f64::ln) / n;
            let var = s.weighted_sum(|x| (x.ln() - mu).powi(2)) / n;
            closed_form(s, DistributionModel::log_normal(mu, var.sqrt()), opts)
        }
        Family::Pareto => {
            reject_constant(s, family)?;
            let xm = s.min();
            let alpha = n / s.weighted_sum(|x| (x / xm).ln());
            closed_form(s, DistributionModel::pareto(alpha, xm), opts)
        }
        Family::PowerLaw => {
            reject_constant(s, family)?;
            let xmin = s.min();
            let alpha = 1.0 + n / s.weighted_sum(|x| (x / xmin).ln());
            closed_form(s, DistributionModel::power_law(alpha, xmin), opts)
        }
        Family::Lomax => {
            reject_constant(s, family)?;
            let m = maximize_profile(s);
            let model = DistributionModel::lomax(m.alpha, m.sigma)?;
            let message = (!m.interior).then(|| "profile likelihood has no interior maximum".to_string());
            Ok(finish(s, model, m.interior, m.iterations, message, opts))
        }
        Family::PowerLawCutoff => {
            reject_constant(s, family)?;
            fit_power_law_cutoff(s, opts)
        }
    }
}

/// Power law with exponential cutoff, `xmin` fixed at the sample minimum.
fn fit_power_law_cutoff(s: &Sample, opts: &FitOptions) -> Result<FitResult> {
    let n = s.n() as f64;
    let xmin = s.min();
    let sum_ln = s.weighted_sum(f64::ln);
    let sum_x = s.weighted_sum(|x| x);
    // ℓ(α, λ) = −α Σ ln x − λ Σ x − n [(α − 1) ln λ + ln Γ(1 − α, λ xmin)]
    let loglik = |alpha: f64, ln_lambda: f64| {
        let lambda = ln_lambda.exp();
        -alpha * sum_ln - lambda * sum_x - n * ((alpha - 1.0) * ln_lambda + ln_upper_gamma(1.0 - alpha, lambda * xmin))
    };
    let objective = |th: &[f64], g: &mut [f64]| {
        let f = -loglik(th[0], th[1]);
        if !f.is_finite() {
            return None;
        }
        for i in 0..2 {
            let h = 1e-6 * th[i].abs().max(1.0);
            let mut up = [th[0], th[1]];
            let mut dn = up;
            up[i] += h;
            dn[i] -= h;
            g[i] = (-loglik(up[0], up[1]) + loglik(dn[0], dn[1])) / (2.0 * h);
        }
        Some(f)
    };

    let alpha_pl = 1.0 + n / s.weighted_sum(|x| (x / xmin).ln());
    let ln_mean = s.mean().ln();
    let lb_opts = LbfgsOptions {
        max_iter: opts.max_iter,
        grad_tol: opts.grad_tol,
        step_tol: opts.step_tol,
        ..LbfgsOptions::default()
    };
    let best = [
        [alpha_pl, -ln_mean - 3f64.ln()],
        [1.0, -ln_mean],
        [alpha_pl.min(1.5) - 0.5, -ln_mean - 10f64.ln()],
    ]
    .iter()
    .map(|x0| minimize(objective, x0, &lb_opts))
    .filter(|r| r.f.is_finite())
    .min_by(|a, b| a.f.total_cmp(&b.f))
    .ok_or_else(|| Error::Evaluation("power law with cutoff could not be evaluated".into()))?;

    let (alpha, lambda) = (best.x[0], best.x[1].exp());
    let model = DistributionModel::power_law_cutoff(alpha, lambda, xmin)?;
    let fit = finish(s, model, true, best.iterations, None, opts);
    let tol_ok = fit.grad_norm <= 1e-6 * n;
    let mut converged = best.converged() || tol_ok;
    let mut message = None;
    if lambda * s.max() < 1e-10 {
        converged = false;
        message = Some("cutoff rate collapsed to zero; pure power law is preferred".to_string());
    } else if !converged {
        message = Some(format!("optimizer stopped with {:?}", best.termination));
    }
    if converged == fit.converged && message.is_none() {
        return Ok(fit);
    }
    Ok(finish(s, model, converged, best.iterations, message, opts))
}
