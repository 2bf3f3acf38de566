use crate::error::{Error, Result};
use crate::graph_io::DegreeHistogram;

/// Observations for likelihood fitting, stored as distinct values with
/// multiplicities so a degree histogram is fitted without expanding it.
///
/// Fitting the weighted form is algebraically identical to fitting the
/// node-level sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    weights: Vec<f64>,
    n: usize,
}

impl Sample {
    /// Unweighted sample. Needs at least three positive finite values.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; values.len()];
        Self::weighted(values, weights)
    }

    /// Each histogram row becomes one value weighted by its count.
    pub fn from_histogram(h: &DegreeHistogram) -> Result<Self> {
        let (values, weights) = h.rows().iter().map(|&(d, c)| (d as f64, c as f64)).unzip();
        Self::weighted(values, weights)
    }

    fn weighted(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "sample values must be positive and finite (found {bad})"
            )));
        }
        let total: f64 = weights.iter().sum();
        let n = total.round() as usize;
        if n < 3 {
            return Err(Error::InvalidInput(format!("sample needs at least 3 observations (got {n})")));
        }
        Ok(Self { values, weights, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct stored values.
    pub fn len_distinct(&self) -> usize {
        self.values.len()
    }

    /// `(value, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Node-level values, each repeated by its weight. Has exactly `n` entries.
    pub fn expand(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        for (v, w) in self.iter() {
            out.extend(std::iter::repeat_n(v, w.round() as usize));
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.weighted_sum(|x| x) / self.n as f64
    }

    /// `Σ w_i f(x_i)`.
    pub fn weighted_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// True when every observation has the same value.
    pub fn is_constant(&self) -> bool {
        let first = self.values[0];
        self.values.iter().all(|&v| v == first)
    }
}

/// Coefficient of variation with the population (`1/n`) variance, computed
/// in two passes.
pub fn cv(s: &Sample) -> Result<f64> {
    let mean = s.mean();
    if !(mean > 0.0) {
        return Err(Error::InvalidInput("coefficient of variation needs a positive mean".into()));
    }
    let var = s.weighted_sum(|x| (x - mean).powi(2)) / s.n() as f64;
    Ok(var.sqrt() / mean)
}
