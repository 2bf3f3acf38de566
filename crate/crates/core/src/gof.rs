//! Goodness of fit: adaptive chi-square binning, parametric bootstrap
//! p-values and the KLD / RMSE / MAE comparison metrics.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{DistributionModel, Family};
use crate::error::{Error, Result};
use crate::estimation::{fit_mlm, fit_model, FitOptions, FitResult, Sample};
use crate::graph_io::DegreeHistogram;

/// Default minimum expected count per bin.
pub const MIN_EXPECTED: f64 = 5.0;

/// Smallest number of bootstrap replicates accepted.
pub const MIN_REPLICATES: usize = 99;

/// Floor applied to model probabilities inside the KL divergence.
const KLD_FLOOR: f64 = 1e-12;

/// Bins over the integer degrees. Bin `i` covers `[edges[i], edges[i+1])`;
/// the last edge is `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinScheme {
    pub edges: Vec<f64>,
    pub expected: Vec<f64>,
    pub observed: Vec<u64>,
}

impl BinScheme {
    pub fn len(&self) -> usize {
        self.expected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expected.is_empty()
    }
}

/// Smallest `k ≥ lo` with `n · P(lo ≤ X ≤ k) ≥ target`, or `None` if the
/// mass of `[lo, ∞)` falls short.
fn close_bin(m: &DistributionModel, n: f64, lo: u64, target: f64) -> Option<u64> {
    let mass = |k: u64| n * m.degree_mass(lo, Some(k));
    if n * m.degree_mass(lo, None) < target {
        return None;
    }
    if mass(lo) >= target {
        return Some(lo);
    }
    // Exponential search for an upper bracket, then bisection.
    let mut a = lo;
    let mut step = 1u64;
    let b = loop {
        let next = lo.saturating_add(step);
        if mass(next) >= target {
            break next;
        }
        if next == u64::MAX {
            return None;
        }
        a = next;
        step = step.saturating_mul(2);
    };
    let mut b = b;
    while b - a > 1 {
        let mid = a + (b - a) / 2;
        if mass(mid) >= target {
            b = mid;
        } else {
            a = mid;
        }
    }
    Some(b)
}

/// Greedy left-to-right binning of the integer degrees `1, 2, …`.
///
/// A bin `[lo, k]` is closed at the first `k` where its expected count
/// reaches `min_expected`, provided what remains above `k + ½` also reaches
/// `min_expected`; otherwise `[lo, ∞)` becomes the final bin.
pub fn build_bins(h: &DegreeHistogram, m: &DistributionModel, min_expected: f64) -> Result<BinScheme> {
    if !(min_expected > 0.0) {
        return Err(Error::InvalidInput(format!("min_expected must be positive (got {min_expected})")));
    }
    let n = h.n() as f64;
    let total = n * m.degree_mass(1, None);
    if !(total >= 2.0 * min_expected) {
        return Err(Error::InvalidInput(format!(
            "expected count {total:.3} over degrees >= 1 is below 2 x {min_expected}; sample too small to bin"
        )));
    }

    let mut edges = vec![0.5];
    let mut expected = Vec::new();
    let mut lo = 1u64;
    loop {
        let closed = close_bin(m, n, lo, min_expected)
            .filter(|&k| k < u64::MAX && n * m.degree_mass(k + 1, None) >= min_expected);
        match closed {
            Some(k) => {
                expected.push(n * m.degree_mass(lo, Some(k)));
                edges.push(k as f64 + 0.5);
                lo = k + 1;
            }
            None => {
                expected.push(n * m.degree_mass(lo, None));
                edges.push(f64::INFINITY);
                break;
            }
        }
    }

    let mut observed = vec![0u64; expected.len()];
    for &(d, c) in h.rows() {
        let x = d as f64;
        let i = edges.partition_point(|&e| e <= x) - 1;
        observed[i] += c;
    }
    Ok(BinScheme {
        edges,
        expected,
        observed,
    })
}

/// `Σ (O − E)² / E`.
pub fn chi_square_stat(b: &BinScheme) -> f64 {
    b.observed
        .iter()
        .zip(&b.expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub seed: u64,
    /// Re-estimate parameters on every replicate.
    pub refit: bool,
    pub min_expected: f64,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            replicates: 1000,
            seed: 0,
            refit: true,
            min_expected: MIN_EXPECTED,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GofReport {
    /// Chi-square statistic of the observed histogram.
    pub statistic: f64,
    pub p_value: f64,
    pub replicates: usize,
    /// Replicates with `T_r ≥ T_obs`.
    pub exceedances: usize,
    pub refit_per_replicate: bool,
    pub seed: u64,
    pub bins: usize,
    /// Replicates re-drawn because the refit or binning failed.
    pub redraws: usize,
}

/// Histogram of `n` draws from `m`, rounded half away from zero, floored at 1.
fn draw_histogram(m: &DistributionModel, n: usize, rng: &mut ChaCha8Rng) -> Result<DegreeHistogram> {
    let values = m.sample(n, rng)?;
    DegreeHistogram::from_values(&values)
}

fn refit(fit: &FitResult, h: &DegreeHistogram) -> Result<DistributionModel> {
    let s = Sample::from_histogram(h)?;
    let f = match fit.model {
        DistributionModel::Mlm(p) => fit_mlm(&s, &p, &FitOptions::warm())?,
        other => fit_model(&s, other.family(), &FitOptions::default())?,
    };
    if f.converged {
        Ok(f.model)
    } else {
        Err(Error::Convergence(f.message.unwrap_or_else(|| "refit did not converge".into())))
    }
}

/// One replicate statistic plus the number of re-draws it needed.
fn replicate(
    fit: &FitResult,
    n: usize,
    opts: &BootstrapOptions,
    r: usize,
    max_redraws: usize,
) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(r as u64);
    let mut redraws = 0;
    loop {
        let attempt = draw_histogram(&fit.model, n, &mut rng).and_then(|h| {
            let model = if opts.refit { refit(fit, &h)? } else { fit.model };
            let bins = build_bins(&h, &model, opts.min_expected)?;
            Ok(chi_square_stat(&bins))
        });
        match attempt {
            Ok(t) => return Ok((t, redraws)),
            Err(_) if redraws < max_redraws => redraws += 1,
            Err(e) => return Err(Error::Convergence(format!("replicate {r} failed after {redraws} re-draws: {e}"))),
        }
    }
}

/// Parametric bootstrap p-value of the chi-square statistic,
/// `p = (1 + #{T_r ≥ T_obs}) / (B + 1)`.
///
/// Replicate `r` uses the ChaCha8 stream `r` of `seed`, so the result does
/// not depend on the number of threads. `progress` is called with the number
/// of finished replicates.
pub fn bootstrap_pvalue(
    h: &DegreeHistogram,
    fit: &FitResult,
    opts: &BootstrapOptions,
    progress: Option<&(dyn Fn(usize) + Sync)>,
) -> Result<GofReport> {
    if opts.replicates < MIN_REPLICATES {
        return Err(Error::InvalidInput(format!(
            "at least {MIN_REPLICATES} bootstrap replicates are required (got {})",
            opts.replicates
        )));
    }
    if !fit.converged {
        return Err(Error::Convergence("bootstrap needs a converged fit".into()));
    }
    let bins = build_bins(h, &fit.model, opts.min_expected)?;
    let t_obs = chi_square_stat(&bins);
    let n = h.n() as usize;
    let budget = opts.replicates.div_ceil(10);

    let done = AtomicUsize::new(0);
    let run = || -> Vec<Result<(f64, usize)>> {
        (0..opts.replicates)
            .into_par_iter()
            .map(|r| {
                let out = replicate(fit, n, opts, r, budget);
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(cb) = progress {
                    cb(k);
                }
                out
            })
            .collect()
    };
    let results = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut exceedances = 0;
    let mut redraws = 0;
    for res in results {
        let (t, extra) = res?;
        redraws += extra;
        if t >= t_obs {
            exceedances += 1;
        }
    }
    if redraws > budget {
        return Err(Error::Convergence(format!(
            "{redraws} replicates had to be re-drawn, more than 10% of {}",
            opts.replicates
        )));
    }
    Ok(GofReport {
        statistic: t_obs,
        p_value: (1 + exceedances) as f64 / (opts.replicates + 1) as f64,
        replicates: opts.replicates,
        exceedances,
        refit_per_replicate: opts.refit,
        seed: opts.seed,
        bins: bins.len(),
        redraws,
    })
}

/// `Σ p_k ln(p_k / q_k)` over the observed degrees, with the model
/// probabilities floored at 1e-12 and renormalized over the observed support.
pub fn kld(h: &DegreeHistogram, m: &DistributionModel) -> f64 {
    let n = h.n() as f64;
    let q: Vec<f64> = h.rows().iter().map(|&(k, _)| m.interval_pmf(k).max(KLD_FLOOR)).collect();
    let q_total: f64 = q.iter().sum();
    h.rows()
        .iter()
        .zip(&q)
        .map(|(&(_, c), &qk)| {
            let p = c as f64 / n;
            p * (p / (qk / q_total)).ln()
        })
        .sum::<f64>()
        .max(0.0)
}

/// RMSE and MAE between observed counts and `n · P(degree = k)`, averaged
/// over the observed degrees.
pub fn rmse_mae(h: &DegreeHistogram, m: &DistributionModel) -> (f64, f64) {
    let n = h.n() as f64;
    let rows = h.rows();
    let (sq, abs) = rows.iter().fold((0.0, 0.0), |(sq, abs), &(k, c)| {
        let d = c as f64 - n * m.interval_pmf(k);
        (sq + d * d, abs + d.abs())
    });
    let len = rows.len() as f64;
    ((sq / len).sqrt(), abs / len)
}

/// One family's line in a comparison.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsRow {
    pub family: Family,
    pub kld: Option<f64>,
    pub rmse: Option<f64>,
    pub mae: Option<f64>,
    pub loglik: Option<f64>,
    pub params: BTreeMap<String, f64>,
    pub converged: bool,
    /// Why the family could not be fitted.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    /// Sorted by KLD ascending; failed families last.
    pub rows: Vec<MetricsRow>,
}

/// Each requested family with its fit, or the error that stopped it.
pub type FamilyFits = Vec<(Family, Result<FitResult>)>;

/// Fits each family and computes KLD, RMSE and MAE. A family that cannot be
/// fitted yields a row with `error` set; the others are unaffected.
pub fn compare_models(
    h: &DegreeHistogram,
    families: &[Family],
    opts: &FitOptions,
) -> Result<(MetricsReport, FamilyFits)> {
    let s = Sample::from_histogram(h)?;
    let fits: FamilyFits = families.iter().map(|&f| (f, fit_model(&s, f, opts))).collect();
    let mut rows: Vec<MetricsRow> = fits
        .iter()
        .map(|(family, fit)| match fit {
            Ok(f) => {
                let (rmse, mae) = rmse_mae(h, &f.model);
                MetricsRow {
                    family: *family,
                    kld: Some(kld(h, &f.model)),
                    rmse: Some(rmse),
                    mae: Some(mae),
                    loglik: Some(f.loglik),
                    params: f.model.params(),
                    converged: f.converged,
                    error: None,
                }
            }
            Err(e) => MetricsRow {
                family: *family,
                kld: None,
                rmse: None,
                mae: None,
                loglik: None,
                params: BTreeMap::new(),
                converged: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    rows.sort_by(|a, b| match (a.kld, b.kld) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok((MetricsReport { rows }, fits))
}
