//! Covariance from observed information and Wald confidence intervals.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::fit::FitResult;
use crate::error::{Error, Result};
use crate::special::normal_quantile;

/// Condition number above which the information matrix is flagged singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Covariance obtained by inverting an information matrix.
#[derive(Debug, Clone, Serialize)]
pub struct Inversion {
    #[serde(serialize_with = "serialize_matrix")]
    pub covariance: DMatrix<f64>,
    /// Ratio of the largest to the smallest absolute eigenvalue.
    pub condition_number: f64,
    /// Cholesky failed (or the matrix was flagged singular) and the covariance
    /// is a pseudo-inverse over the positive eigen-directions.
    pub pseudo_inverse: bool,
    pub singular: bool,
}

pub(crate) fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// Inverts a symmetric information matrix. Rows and columns that are
/// identically zero (fixed parameters) get zero variance.
pub fn invert_information(info: &DMatrix<f64>) -> Result<Inversion> {
    let k = info.nrows();
    if k != info.ncols() || info.iter().any(|v| !v.is_finite()) {
        return Err(Error::Evaluation("information matrix is not a finite square matrix".into()));
    }
    let free: Vec<usize> = (0..k).filter(|&i| (0..k).any(|j| info[(i, j)] != 0.0)).collect();
    let mut covariance = DMatrix::zeros(k, k);
    if free.is_empty() {
        return Ok(Inversion {
            covariance,
            condition_number: f64::INFINITY,
            pseudo_inverse: true,
            singular: true,
        });
    }
    let sub = DMatrix::from_fn(free.len(), free.len(), |i, j| {
        0.5 * (info[(free[i], free[j])] + info[(free[j], free[i])])
    });
    let eig = SymmetricEigen::new(sub.clone());
    let abs: Vec<f64> = eig.eigenvalues.iter().map(|v| v.abs()).collect();
    let max = abs.iter().copied().fold(0.0, f64::max);
    let min = abs.iter().copied().fold(f64::INFINITY, f64::min);
    let condition_number = if min > 0.0 { max / min } else { f64::INFINITY };
    let singular = condition_number > SINGULAR_CONDITION;

    let (inv, pseudo_inverse) = match sub.clone().cholesky() {
        Some(ch) if !singular => (ch.inverse(), false),
        _ => {
            let cutoff = max * f64::EPSILON * free.len() as f64;
            let mut inv = DMatrix::zeros(free.len(), free.len());
            for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda > cutoff {
                    let v = eig.eigenvectors.column(idx);
                    inv += (v * v.transpose()) / lambda;
                }
            }
            (inv, true)
        }
    };
    for (i, &fi) in free.iter().enumerate() {
        for (j, &fj) in free.iter().enumerate() {
            covariance[(fi, fj)] = 0.5 * (inv[(i, j)] + inv[(j, i)]);
        }
    }
    Ok(Inversion {
        covariance,
        condition_number,
        pseudo_inverse,
        singular,
    })
}

/// Wald interval `θ̂ ± z·√Var` for each parameter at level `1 − k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamInterval {
    pub name: &'static str,
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
}

/// Intervals at level `1 − k` (`k = 0.05` gives 95% intervals).
pub fn confidence_intervals(fit: &FitResult, k: f64) -> Result<Vec<ParamInterval>> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidInput(format!("interval level k must lie in (0, 1) (got {k})")));
    }
    if !fit.converged {
        return Err(Error::Convergence("confidence intervals need a converged fit".into()));
    }
    let inv = fit
        .inversion
        .as_ref()
        .ok_or_else(|| Error::Evaluation("fit has no covariance matrix".into()))?;
    Ok(wald_intervals(fit, &inv.covariance, k))
}

pub(crate) fn wald_intervals(fit: &FitResult, cov: &DMatrix<f64>, k: f64) -> Vec<ParamInterval> {
    let z = normal_quantile(1.0 - k / 2.0);
    let names = fit.model.family().param_names();
    fit.model
        .param_values()
        .into_iter()
        .zip(names)
        .enumerate()
        .map(|(i, (est, &name))| {
            let half = z * cov[(i, i)].max(0.0).sqrt();
            ParamInterval {
                name,
                estimate: est,
                low: est - half,
                high: est + half,
            }
        })
        .collect()
}

/// Central-difference Hessian of `f` with per-coordinate step
/// `rel · max(|x_j|, 1e-3)`. Coordinates with `fixed[j]` are left at zero.
pub fn numeric_hessian<F>(f: F, x: &[f64], fixed: &[bool], rel: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let k = x.len();
    let h: Vec<f64> = x.iter().map(|v| rel * v.abs().max(1e-3)).collect();
    let mut out = DMatrix::zeros(k, k);
    let eval = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut y = x.to_vec();
        y[di] += si * h[di];
        y[dj] += sj * h[dj];
        f(&y)
    };
    let f0 = f(x);
    for i in 0..k {
        if fixed[i] {
            continue;
        }
        out[(i, i)] = (eval(i, 1.0, i, 0.0) - 2.0 * f0 + eval(i, -1.0, i, 0.0)) / (h[i] * h[i]);
        for j in 0..i {
            if fixed[j] {
                continue;
            }
            let v = (eval(i, 1.0, j, 1.0) - eval(i, 1.0, j, -1.0) - eval(i, -1.0, j, 1.0) + eval(i, -1.0, j, -1.0))
                / (4.0 * h[i] * h[j]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Central-difference gradient, same step rule as [`numeric_hessian`].
pub fn numeric_gradient<F>(f: F, x: &[f64], fixed: &[bool], rel: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    (0..x.len())
        .map(|i| {
            if fixed[i] {
                return 0.0;
            }
            let h = rel * x[i].abs().max(1e-3);
            let mut up = x.to_vec();
            let mut dn = x.to_vec();
            up[i] += h;
            dn[i] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect()
}
