//! Limited-memory BFGS minimizer with a strong-Wolfe line search.
//!
//! The objective returns `None` (or a non-finite value) where it cannot be
//! evaluated; the line search treats such points as `+∞` and backs off.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct LbfgsOptions {
    pub max_iter: usize,
    pub memory: usize,
    /// Stop when `‖∇f‖∞ <= grad_tol · max(1, |f|)`.
    pub grad_tol: f64,
    /// Stop when the last accepted step moved every coordinate by less than this.
    pub step_tol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            memory: 8,
            grad_tol: 1e-8,
            step_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Gradient,
    Step,
    MaxIterations,
    LineSearchFailed,
    NotEvaluable,
}

#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

impl OptimResult {
    pub fn converged(&self) -> bool {
        matches!(self.termination, Termination::Gradient | Termination::Step)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64], &mut [f64]) -> Option<f64>> Counted<F> {
    fn eval(&mut self, x: &[f64], g: &mut [f64]) -> f64 {
        self.evaluations += 1;
        match (self.f)(x, g) {
            Some(v) if v.is_finite() && g.iter().all(|d| d.is_finite()) => v,
            _ => f64::INFINITY,
        }
    }
}

/// Minimizes `f` starting at `x0`. `f` writes the gradient into its second
/// argument and returns the function value.
pub fn minimize<F>(f: F, x0: &[f64], opts: &LbfgsOptions) -> OptimResult
where
    F: FnMut(&[f64], &mut [f64]) -> Option<f64>,
{
    let n = x0.len();
    let mut obj = Counted { f, evaluations: 0 };
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = obj.eval(&x, &mut g);
    if !fx.is_finite() {
        return OptimResult {
            x,
            f: fx,
            grad: g,
            iterations: 0,
            evaluations: obj.evaluations,
            termination: Termination::NotEvaluable,
        };
    }

    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    for iter in 0..opts.max_iter {
        iterations = iter;
        if inf_norm(&g) <= opts.grad_tol * fx.abs().max(1.0) {
            termination = Termination::Gradient;
            break;
        }

        // Two-loop recursion for d = −H g.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let gamma = history
            .back()
            .map(|(s, y, _)| dot(s, y) / dot(y, y))
            .unwrap_or_else(|| 1.0 / inf_norm(&g).max(1.0));
        q.iter_mut().for_each(|v| *v *= gamma);
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut dg = dot(&d, &g);
        if !(dg < 0.0) {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            dg = dot(&d, &g);
        }

        let Some((_step, f_new, x_new, g_new)) = line_search(&mut obj, &x, fx, &d, dg) else {
            if history.is_empty() {
                termination = Termination::LineSearchFailed;
                break;
            }
            // Retry once from steepest descent with a fresh memory.
            history.clear();
            continue;
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let moved = inf_norm(&s);
        x = x_new;
        fx = f_new;
        g = g_new;
        if sy > 1e-300 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        if moved < opts.step_tol {
            termination = Termination::Step;
            iterations = iter + 1;
            break;
        }
        iterations = iter + 1;
    }
    if termination == Termination::MaxIterations && inf_norm(&g) <= opts.grad_tol * fx.abs().max(1.0) {
        termination = Termination::Gradient;
    }

    OptimResult {
        x,
        f: fx,
        grad: g,
        iterations,
        evaluations: obj.evaluations,
        termination,
    }
}

/// A trial point along the search direction.
struct Trial {
    t: f64,
    f: f64,
    /// Directional derivative `d·∇f` at the trial point.
    dg: f64,
    x: Vec<f64>,
    g: Vec<f64>,
}

impl Trial {
    fn key(&self) -> (f64, f64, f64) {
        (self.t, self.f, self.dg)
    }
}

struct Search<'a, F> {
    obj: &'a mut Counted<F>,
    x: &'a [f64],
    d: &'a [f64],
}

impl<F: FnMut(&[f64], &mut [f64]) -> Option<f64>> Search<'_, F> {
    fn at(&mut self, t: f64) -> Trial {
        let x: Vec<f64> = self.x.iter().zip(self.d).map(|(xi, di)| xi + t * di).collect();
        let mut g = vec![0.0; x.len()];
        let f = self.obj.eval(&x, &mut g);
        let dg = if f.is_finite() { dot(&g, self.d) } else { f64::NAN };
        Trial { t, f, dg, x, g }
    }
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

/// Strong-Wolfe line search: bracketing followed by zoom with cubic
/// interpolation. Returns `(step, f, x, g)`.
fn line_search<F>(
    obj: &mut Counted<F>,
    x: &[f64],
    f0: f64,
    d: &[f64],
    dg0: f64,
) -> Option<(f64, f64, Vec<f64>, Vec<f64>)>
where
    F: FnMut(&[f64], &mut [f64]) -> Option<f64>,
{
    let mut search = Search { obj, x, d };
    let mut prev = (0.0, f0, dg0);
    let mut t = 1.0;
    let mut first = true;
    for _ in 0..60 {
        let trial = search.at(t);
        if !trial.f.is_finite() {
            // Outside the evaluable region: shrink toward the last good point.
            t = prev.0 + 0.25 * (t - prev.0);
            if t - prev.0 < 1e-20 {
                return None;
            }
            continue;
        }
        if trial.f > f0 + C1 * t * dg0 || (!first && trial.f >= prev.1) {
            return zoom(&mut search, prev, trial.key(), f0, dg0);
        }
        if trial.dg.abs() <= -C2 * dg0 {
            return Some((trial.t, trial.f, trial.x, trial.g));
        }
        if trial.dg >= 0.0 {
            return zoom(&mut search, trial.key(), prev, f0, dg0);
        }
        prev = trial.key();
        t *= 2.0;
        first = false;
    }
    None
}

fn zoom<F>(
    search: &mut Search<'_, F>,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
    f0: f64,
    dg0: f64,
) -> Option<(f64, f64, Vec<f64>, Vec<f64>)>
where
    F: FnMut(&[f64], &mut [f64]) -> Option<f64>,
{
    let mut best: Option<Trial> = None;
    for _ in 0..60 {
        let (a, b) = if lo.0 < hi.0 { (lo.0, hi.0) } else { (hi.0, lo.0) };
        let width = b - a;
        if width <= 1e-16 * b.abs().max(1e-300) {
            break;
        }
        let mut t = cubic_min(lo, hi).unwrap_or(0.5 * (lo.0 + hi.0));
        if !(t > a + 0.1 * width && t < b - 0.1 * width) {
            t = 0.5 * (lo.0 + hi.0);
        }
        let trial = search.at(t);
        if !trial.f.is_finite() {
            hi = (t, f64::INFINITY, f64::NAN);
            continue;
        }
        if trial.f > f0 + C1 * t * dg0 || trial.f >= lo.1 {
            hi = trial.key();
        } else {
            if trial.dg.abs() <= -C2 * dg0 {
                return Some((trial.t, trial.f, trial.x, trial.g));
            }
            if trial.dg * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = trial.key();
            best = Some(trial);
        }
    }
    // Fall back to a sufficient-decrease point even if curvature was not met.
    best.filter(|p| p.f < f0).map(|p| (p.t, p.f, p.x, p.g))
}

fn cubic_min(a: (f64, f64, f64), b: (f64, f64, f64)) -> Option<f64> {
    let (t0, f0, d0) = a;
    let (t1, f1, d1) = b;
    if !(f0.is_finite() && f1.is_finite() && d0.is_finite() && d1.is_finite()) {
        return None;
    }
    let e = d0 + d1 - 3.0 * (f0 - f1) / (t0 - t1);
    let disc = e * e - d0 * d1;
    if disc < 0.0 {
        return None;
    }
    let r = (t1 - t0).signum() * disc.sqrt();
    let t = t1 - (t1 - t0) * (d1 + r - e) / (d1 - d0 + 2.0 * r);
    t.is_finite().then_some(t)
}
