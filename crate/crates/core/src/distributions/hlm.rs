//! The exponent function `m(x)` that turns the Lomax survival
//! `(1 + x)^(−α)` into `(1 + x)^(−m(x))`.
//!
//! The Modified Lomax distribution uses
//! `m(x) = α (L / (1 + L))^β` with `L = ln(1 + x)`, evaluated at `x/σ`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Final relative gap `|m(x) − α| / α` that is accepted as "approaching α"
/// outright. Larger gaps pass when they decay like `1 / ln x`.
pub const LIMIT_TOLERANCE: f64 = 0.05;

/// `m(x) = α (ln(1+x) / (1 + ln(1+x)))^β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlmShapeFn {
    alpha: f64,
    beta: f64,
}

/// Side from which `m(x)` approaches its limit `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    FromBelow,
    FromAbove,
    Constant,
}

/// Outcome of [`hlm_conditions_check`].
#[derive(Debug, Clone, Serialize)]
pub struct HlmConditionsReport {
    /// `m(x) > 0` at every grid point.
    pub positive: bool,
    pub min_value: f64,
    /// `|m(x) − α|` shrinks along the upper half of the grid and either ends
    /// below [`LIMIT_TOLERANCE`] relative to `α` or decays at least like
    /// `1 / ln x` there (the scaled gap `(1 + ln(1+x))·gap` at most doubles).
    pub approaches_alpha: bool,
    pub final_rel_gap: f64,
    pub approach: Approach,
    /// `m'(x)/m(x) ≥ −1/((1+x) ln(1+x))` at every grid point.
    pub log_derivative_bound: bool,
    /// Smallest value of `(1+x) ln(1+x) · m'(x)/m(x) + 1` over the grid;
    /// condition 3 holds where this is non-negative.
    pub worst_margin: f64,
}

impl HlmConditionsReport {
    pub fn all_pass(&self) -> bool {
        self.positive && self.approaches_alpha && self.log_derivative_bound
    }
}

impl HlmShapeFn {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::param(format!("alpha must be positive and finite (got {alpha})")));
        }
        if !beta.is_finite() || beta <= -1.0 {
            return Err(Error::param(format!("beta must exceed -1 (got {beta})")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn value(&self, x: f64) -> f64 {
        let l = x.ln_1p();
        self.alpha * (l / (1.0 + l)).powf(self.beta)
    }

    /// `m'(x) = αβ/(x+1) · (L/(1+L))^(β−1) · (1+L)^(−2)`.
    pub fn derivative(&self, x: f64) -> f64 {
        let l = x.ln_1p();
        self.alpha * self.beta / (x + 1.0) * (l / (1.0 + l)).powf(self.beta - 1.0) / (1.0 + l).powi(2)
    }

    /// `m'(x)/m(x) = β / ((1+x) L (1+L))`, computed without forming the ratio.
    pub fn log_derivative(&self, x: f64) -> f64 {
        let l = x.ln_1p();
        self.beta / ((1.0 + x) * l * (1.0 + l))
    }

    pub fn approach(&self) -> Approach {
        if self.beta == 0.0 {
            Approach::Constant
        } else if self.beta < 0.0 {
            // L/(1+L) < 1 raised to a negative power exceeds one.
            Approach::FromAbove
        } else {
            Approach::FromBelow
        }
    }
}

/// Numerically checks the HLM exponent conditions on a sorted positive grid.
pub fn hlm_conditions_check(s: &HlmShapeFn, grid: &[f64]) -> Result<HlmConditionsReport> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("grid must be non-empty".into()));
    }
    if grid.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput("grid points must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }

    let values: Vec<f64> = grid.iter().map(|&x| s.value(x)).collect();
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);

    let gaps: Vec<f64> = values.iter().map(|v| (v - s.alpha).abs()).collect();
    let upper = &gaps[gaps.len() / 2..];
    let shrinking = upper.windows(2).all(|w| w[1] <= w[0]);
    let final_rel_gap = gaps[gaps.len() - 1] / s.alpha;
    let half = grid.len() / 2;
    let scaled = |i: usize| (1.0 + grid[i].ln_1p()) * gaps[i];
    let log_decay = scaled(grid.len() - 1) <= 2.0 * scaled(half);

    let worst_margin = grid
        .iter()
        .map(|&x| (1.0 + x) * x.ln_1p() * s.log_derivative(x) + 1.0)
        .fold(f64::INFINITY, f64::min);

    Ok(HlmConditionsReport {
        positive: min_value > 0.0,
        min_value,
        approaches_alpha: shrinking && (final_rel_gap <= LIMIT_TOLERANCE || log_decay),
        final_rel_gap,
        approach: s.approach(),
        log_derivative_bound: worst_margin >= 0.0,
        worst_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decades(lo: i32, hi: i32) -> Vec<f64> {
        (lo..=hi).map(|j| 10f64.powi(j)).collect()
    }

    #[test]
    fn constant_exponent_passes_everything() {
        let s = HlmShapeFn::new(2.0, 0.0).unwrap();
        let r = hlm_conditions_check(&s, &[0.3, 1.0, 7.0, 1e3]).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.approach, Approach::Constant);
        assert_eq!(r.final_rel_gap, 0.0);
    }

    #[test]
    fn negative_beta_passes_on_decade_grid() {
        let s = HlmShapeFn::new(2.0, -0.5).unwrap();
        let r = hlm_conditions_check(&s, &decades(0, 8)).unwrap();
        assert!(r.all_pass(), "{r:?}");
        // The margin is 1 + β/(1 + L), smallest at the first grid point.
        let l = 2f64.ln();
        assert!((r.worst_margin - (1.0 - 0.5 / (1.0 + l))).abs() < 1e-12);
    }

    #[test]
    fn positive_beta_approaches_from_below() {
        let s = HlmShapeFn::new(1.0, 0.7).unwrap();
        let r = hlm_conditions_check(&s, &decades(0, 8)).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.approach, Approach::FromBelow);
        assert!(s.value(1e8) < 1.0);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let s = HlmShapeFn::new(1.3, -0.4).unwrap();
        for &x in &[0.5, 3.0, 40.0] {
            let h = 1e-6 * x;
            let fd = (s.value(x + h) - s.value(x - h)) / (2.0 * h);
            assert!(((s.derivative(x) - fd) / fd).abs() < 1e-7);
            assert!((s.log_derivative(x) - s.derivative(x) / s.value(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_grids_rejected() {
        let s = HlmShapeFn::new(1.0, 0.0).unwrap();
        assert!(hlm_conditions_check(&s, &[]).is_err());
        assert!(hlm_conditions_check(&s, &[1.0, 0.5]).is_err());
        assert!(hlm_conditions_check(&s, &[0.0, 1.0]).is_err());
    }
}
