//! Maximum-likelihood fitting of the Modified Lomax model.
//!
//! The optimizer works on `θ = (ln α, ln(1 + β), ln σ)` so every point of
//! `ℝ³` is a valid parameter vector. Each start runs L-BFGS on `−ℓ(θ)` and is
//! finished with Newton steps using the analytic Hessian; the best
//! log-likelihood over all starts wins.

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::intervals::{invert_information, wald_intervals, Inversion, ParamInterval};
use super::likelihood::totals;
use super::lomax::maximize_profile;
use super::sample::{cv, Sample};
use crate::distributions::{DistributionModel, Family, MlmParams};
use crate::error::{Error, Result};
use crate::optim::{minimize, LbfgsOptions, Termination};

/// Knobs for [`fit_mlm`] and [`super::fit_model`].
#[derive(Debug, Clone, Serialize)]
pub struct FitOptions {
    /// Extra starts obtained by jittering the initial point.
    pub restarts: usize,
    /// Seed of the jitter generator.
    pub seed: u64,
    /// Half-width of the uniform jitter applied to each of `ln α`,
    /// `ln(1 + β)`, `ln σ`.
    pub jitter: f64,
    /// Also start from the Lomax profile-likelihood fit (`β = 0`).
    pub lomax_start: bool,
    pub max_iter: usize,
    /// Relative gradient tolerance in the transformed coordinates.
    pub grad_tol: f64,
    pub step_tol: f64,
    /// Confidence level of the reported intervals.
    pub ci_level: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            seed: 0,
            jitter: 1.5f64.ln(),
            lomax_start: true,
            max_iter: 500,
            grad_tol: 1e-8,
            step_tol: 1e-12,
            ci_level: 0.95,
        }
    }
}

impl FitOptions {
    /// Single start from the given point. Used for bootstrap refits that are
    /// warm-started at the original estimate.
    pub fn warm() -> Self {
        Self {
            restarts: 0,
            lomax_start: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExistenceVerdict {
    FiniteMaximumGuaranteed,
    NoGuarantee,
}

/// Coefficient-of-variation diagnostic for a finite maximum of the Lomax
/// profile likelihood.
#[derive(Debug, Clone, Serialize)]
pub struct ExistenceCheck {
    pub cv: f64,
    pub verdict: ExistenceVerdict,
    pub warning: Option<String>,
}

/// CV > 1 guarantees that the Lomax profile likelihood has its global
/// maximum at a finite σ. With CV ≤ 1 no such guarantee exists.
pub fn mle_existence_check(s: &Sample) -> ExistenceCheck {
    let c = cv(s).unwrap_or(0.0);
    if c > 1.0 {
        ExistenceCheck {
            cv: c,
            verdict: ExistenceVerdict::FiniteMaximumGuaranteed,
            warning: None,
        }
    } else {
        ExistenceCheck {
            cv: c,
            verdict: ExistenceVerdict::NoGuarantee,
            warning: Some(format!(
                "coefficient of variation {c:.4} <= 1: the likelihood may have no finite maximum"
            )),
        }
    }
}

/// Outcome of a fit. Non-convergence is reported here rather than as an error.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: DistributionModel,
    /// Maximized total log-likelihood.
    pub loglik: f64,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
    /// ∞-norm of the score in the natural parameters.
    pub grad_norm: f64,
    /// Covariance from the inverted observed information, when computed.
    pub inversion: Option<Inversion>,
    pub ci_level: f64,
    pub intervals: Option<Vec<ParamInterval>>,
    pub cv: f64,
    pub existence: ExistenceCheck,
    pub existence_ok: bool,
    /// Why the fit is flagged as not converged, if it is.
    pub message: Option<String>,
}

impl FitResult {
    pub fn loglik_per_obs(&self) -> f64 {
        self.loglik / self.n as f64
    }

    pub fn family(&self) -> Family {
        self.model.family()
    }

    pub fn covariance(&self) -> Option<&DMatrix<f64>> {
        self.inversion.as_ref().map(|i| &i.covariance)
    }

    /// Estimated MLM parameters, if this is an MLM fit.
    pub fn mlm_params(&self) -> Option<MlmParams> {
        match self.model {
            DistributionModel::Mlm(p) => Some(p),
            _ => None,
        }
    }

    /// Assembles a result, computing covariance and intervals when converged.
    pub(crate) fn assemble(
        s: &Sample,
        model: DistributionModel,
        loglik: f64,
        fit: FitState,
        information: Option<DMatrix<f64>>,
        ci_level: f64,
    ) -> Self {
        let existence = mle_existence_check(s);
        let mut r = FitResult {
            model,
            loglik,
            n: s.n(),
            converged: fit.converged,
            iterations: fit.iterations,
            grad_norm: fit.grad_norm,
            inversion: None,
            ci_level,
            intervals: None,
            cv: existence.cv,
            existence_ok: existence.verdict == ExistenceVerdict::FiniteMaximumGuaranteed,
            existence,
            message: fit.message,
        };
        if r.converged {
            if let Some(inv) = information.and_then(|f| invert_information(&f).ok()) {
                r.intervals = Some(wald_intervals(&r, &inv.covariance, 1.0 - ci_level));
                r.inversion = Some(inv);
            }
        }
        r
    }
}

/// Convergence bookkeeping handed to [`FitResult::assemble`].
pub(crate) struct FitState {
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
    pub message: Option<String>,
}

fn to_params(theta: &[f64]) -> Option<MlmParams> {
    MlmParams::new(theta[0].exp(), theta[1].exp_m1(), theta[2].exp()).ok()
}

fn to_theta(p: &MlmParams) -> [f64; 3] {
    [p.alpha().ln(), p.beta().ln_1p(), p.sigma().ln()]
}

/// `dp/dθ` for each coordinate; also equal to the second derivative.
fn jacobian(theta: &[f64]) -> Vector3<f64> {
    Vector3::new(theta[0].exp(), theta[1].exp(), theta[2].exp())
}

struct Run {
    theta: [f64; 3],
    loglik: f64,
    iterations: usize,
    converged: bool,
}

fn run_start(s: &Sample, start: &MlmParams, opts: &FitOptions) -> Option<Run> {
    let lb_opts = LbfgsOptions {
        max_iter: opts.max_iter,
        grad_tol: opts.grad_tol,
        step_tol: opts.step_tol,
        ..LbfgsOptions::default()
    };
    let objective = |th: &[f64], g: &mut [f64]| {
        let p = to_params(th)?;
        let t = totals(s, &p, false);
        let d = jacobian(th);
        for i in 0..3 {
            g[i] = -t.grad[i] * d[i];
        }
        Some(-t.value)
    };
    let lb = minimize(objective, &to_theta(start), &lb_opts);
    if lb.termination == Termination::NotEvaluable {
        return None;
    }
    let theta = [lb.x[0], lb.x[1], lb.x[2]];
    Some(newton_polish(s, theta, lb.iterations, opts))
}

/// Newton iterations in θ with backtracking. The θ-Hessian is
/// `D H D + diag(∇ℓ ⊙ d)` with `D = diag(d)`, `d = dp/dθ`.
fn newton_polish(s: &Sample, mut theta: [f64; 3], mut iterations: usize, opts: &FitOptions) -> Run {
    let mut converged = false;
    let mut loglik = f64::NEG_INFINITY;
    for _ in 0..100 {
        let Some(p) = to_params(&theta) else { break };
        let t = totals(s, &p, true);
        loglik = t.value;
        let d = jacobian(&theta);
        let g = t.grad.component_mul(&d);
        if !g.iter().all(|v| v.is_finite()) {
            break;
        }
        if g.amax() <= opts.grad_tol * loglik.abs().max(1.0) {
            converged = true;
            break;
        }
        let mut m: Matrix3<f64> = -(Matrix3::from_diagonal(&d) * t.hess * Matrix3::from_diagonal(&d));
        for i in 0..3 {
            m[(i, i)] -= g[i];
        }
        let Some(step) = solve_with_ridge(m, g) else { break };

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = [theta[0] + scale * step[0], theta[1] + scale * step[1], theta[2] + scale * step[2]];
            if let Some(q) = to_params(&trial) {
                let v = totals(s, &q, false).value;
                if v.is_finite() && v >= loglik - 1e-14 * loglik.abs() {
                    let moved = (0..3).map(|i| (trial[i] - theta[i]).abs()).fold(0.0, f64::max);
                    theta = trial;
                    accepted = true;
                    if moved < opts.step_tol {
                        converged = true;
                    }
                    break;
                }
            }
            scale *= 0.5;
        }
        iterations += 1;
        if !accepted || converged {
            if let Some(p) = to_params(&theta) {
                loglik = totals(s, &p, false).value;
            }
            break;
        }
    }
    Run {
        theta,
        loglik,
        iterations,
        converged,
    }
}

/// Solves `m x = b` for symmetric `m`, adding a growing ridge until the
/// matrix is positive definite.
fn solve_with_ridge(m: Matrix3<f64>, b: Vector3<f64>) -> Option<Vector3<f64>> {
    let scale = m.diagonal().amax().max(1e-300);
    let mut ridge = 0.0;
    for _ in 0..30 {
        let mut a = m;
        for i in 0..3 {
            a[(i, i)] += ridge;
        }
        if let Some(ch) = a.cholesky() {
            return Some(ch.solve(&b));
        }
        ridge = if ridge == 0.0 { 1e-10 * scale } else { ridge * 10.0 };
    }
    None
}

/// Starting points: `init`, `restarts` jittered copies of it, and optionally
/// the Lomax profile fit.
fn starts(s: &Sample, init: &MlmParams, opts: &FitOptions) -> Vec<MlmParams> {
    let mut out = vec![*init];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let base = to_theta(init);
    for _ in 0..opts.restarts {
        let th: Vec<f64> = base
            .iter()
            .map(|v| v + rng.random_range(-opts.jitter..=opts.jitter))
            .collect();
        if let Some(p) = to_params(&th) {
            out.push(p);
        }
    }
    if opts.lomax_start {
        let m = maximize_profile(s);
        if let Ok(p) = MlmParams::lomax(m.alpha, m.sigma) {
            out.push(p);
        }
    }
    out
}

/// Upper limit on `σ̂ / max(x)` treated as an interior solution. Beyond it
/// the likelihood is drifting toward its `σ → ∞` limit.
const SIGMA_BOUNDARY: f64 = 1e8;

/// Largest `|ln α̂|` and `|ln(1 + β̂)|` treated as interior. Larger values mean
/// the fit is collapsing toward a point mass, where the likelihood is
/// unbounded (typical for nearly constant samples).
const LOG_PARAM_BOUNDARY: f64 = 50.0;

/// Fits the Modified Lomax model by maximum likelihood from `init`
/// (conventionally `(1, 0, 1)`).
///
/// Fails only for degenerate samples; a fit that does not converge is
/// returned with `converged = false`.
pub fn fit_mlm(s: &Sample, init: &MlmParams, opts: &FitOptions) -> Result<FitResult> {
    if s.is_constant() {
        return Err(Error::DegenerateSample(format!(
            "all {} observations equal {}; the model is not identifiable",
            s.n(),
            s.values()[0]
        )));
    }
    let mut best: Option<Run> = None;
    let mut total_iterations = 0;
    for start in starts(s, init, opts) {
        if let Some(run) = run_start(s, &start, opts) {
            total_iterations += run.iterations;
            let better = best.as_ref().is_none_or(|b| run.loglik > b.loglik);
            if better && run.loglik.is_finite() {
                best = Some(run);
            }
        }
    }
    let Some(run) = best else {
        return Err(Error::Evaluation("log-likelihood could not be evaluated at any start".into()));
    };
    let p = to_params(&run.theta).ok_or_else(|| Error::Evaluation("optimizer left the parameter space".into()))?;
    let t = totals(s, &p, true);
    let grad_norm = t.grad.amax();
    let n = s.n() as f64;

    let mut message = None;
    let mut converged = run.converged;
    if !converged {
        message = Some("optimizer stopped before meeting the gradient or step tolerance".to_string());
    } else if !(grad_norm <= 1e-6 * n) {
        converged = false;
        message = Some(format!("score norm {grad_norm:.3e} exceeds 1e-6·n"));
    } else if p.sigma() > SIGMA_BOUNDARY * s.max() {
        converged = false;
        message = Some(format!("sigma diverges ({:.3e}); no interior maximum", p.sigma()));
    } else if run.theta[0].abs() > LOG_PARAM_BOUNDARY || run.theta[1].abs() > LOG_PARAM_BOUNDARY {
        converged = false;
        message = Some(format!(
            "alpha = {:.3e}, beta = {:.3e} run off to the parameter boundary; no interior maximum",
            p.alpha(),
            p.beta()
        ));
    }
    let info = DMatrix::from_fn(3, 3, |i, j| -t.hess[(i, j)]);
    Ok(FitResult::assemble(
        s,
        DistributionModel::Mlm(p),
        t.value,
        FitState {
            converged,
            iterations: total_iterations,
            grad_norm,
            message,
        },
        Some(info),
        opts.ci_level,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::likelihood::mlm_score;

    #[test]
    fn rejects_constant_sample() {
        let s = Sample::from_values(vec![4.0; 3]).unwrap();
        let err = fit_mlm(&s, &MlmParams::new(1.0, 0.0, 1.0).unwrap(), &FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSample(_)));
    }

    #[test]
    fn existence_verdicts() {
        let s = Sample::from_values(vec![1.0, 1.0, 10.0]).unwrap();
        assert_eq!(mle_existence_check(&s).verdict, ExistenceVerdict::FiniteMaximumGuaranteed);
        let c = Sample::from_values(vec![2.0; 4]).unwrap();
        let r = mle_existence_check(&c);
        assert_eq!(r.verdict, ExistenceVerdict::NoGuarantee);
        assert!(r.warning.is_some());
    }

    #[test]
    fn recovers_parameters_from_synthetic_sample() {
        let truth = MlmParams::new(2.0, -0.36, 30.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = Sample::from_values(truth.sample(5000, &mut rng).unwrap()).unwrap();
        let fit = fit_mlm(&s, &MlmParams::new(1.0, 0.0, 1.0).unwrap(), &FitOptions::default()).unwrap();
        assert!(fit.converged, "{:?}", fit.message);
        let p = fit.mlm_params().unwrap();
        let g = mlm_score(&s, &p).unwrap();
        assert!(g.amax() <= 1e-6 * 5000.0);
        let ci = fit.intervals.as_ref().unwrap();
        assert!(ci.iter().all(|c| c.low <= c.estimate && c.estimate <= c.high));
        assert!((p.alpha() - 2.0).abs() < 0.5, "{p:?}");
    }
}
