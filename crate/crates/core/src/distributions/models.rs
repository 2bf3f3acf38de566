//! The eight families compared against each other.
//!
//! | family            | density / mass                               | support      |
//! |-------------------|----------------------------------------------|--------------|
//! | `mlm`             | see [`MlmParams`]                            | `(0, ∞)`     |
//! | `lomax`           | `(α/σ)(1 + x/σ)^(−α−1)`                      | `[0, ∞)`     |
//! | `power_law`       | `((α−1)/xmin)(x/xmin)^(−α)`, `α > 1`         | `[xmin, ∞)`  |
//! | `pareto`          | `α xm^α / x^(α+1)` (Pareto type I)           | `[xm, ∞)`    |
//! | `log_normal`      | `exp(−(ln x − μ)²/(2s²)) / (x s √(2π))`      | `(0, ∞)`     |
//! | `exponential`     | `λ e^(−λx)`                                  | `[0, ∞)`     |
//! | `power_law_cutoff`| `x^(−α) e^(−λx) / (λ^(α−1) Γ(1−α, λ xmin))`  | `[xmin, ∞)`  |
//! | `poisson`         | `λ^k e^(−λ) / k!` at `k = round(x)`          | `{0, 1, …}`  |
//!
//! Integer degrees are compared with the continuous families through
//! [`DistributionModel::interval_pmf`], the mass of `[k − ½, k + ½)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::mlm::{open_unit, MlmParams};
use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_upper_gamma, normal_sf, poisson_ln_pmf, poisson_sf_inclusive};

/// Family tag without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Mlm,
    Lomax,
    PowerLaw,
    Pareto,
    LogNormal,
    Exponential,
    PowerLawCutoff,
    Poisson,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Mlm,
        Family::Lomax,
        Family::PowerLaw,
        Family::Pareto,
        Family::LogNormal,
        Family::Exponential,
        Family::PowerLawCutoff,
        Family::Poisson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Mlm => "mlm",
            Family::Lomax => "lomax",
            Family::PowerLaw => "power_law",
            Family::Pareto => "pareto",
            Family::LogNormal => "log_normal",
            Family::Exponential => "exponential",
            Family::PowerLawCutoff => "power_law_cutoff",
            Family::Poisson => "poisson",
        }
    }

    /// Parameter names in canonical order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Mlm => &["alpha", "beta", "sigma"],
            Family::Lomax => &["alpha", "sigma"],
            Family::PowerLaw => &["alpha", "xmin"],
            Family::Pareto => &["alpha", "xm"],
            Family::LogNormal => &["mu", "s"],
            Family::Exponential => &["lambda"],
            Family::PowerLawCutoff => &["alpha", "lambda", "xmin"],
            Family::Poisson => &["lambda"],
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, Family::Poisson)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key || (key == "lognormal" && *f == Family::LogNormal))
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown model family '{s}' (expected one of: {})",
                    Family::ALL.map(|f| f.name()).join(", ")
                ))
            })
    }
}

/// A fully parameterized member of one of the supported families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionModel {
    Mlm(MlmParams),
    Lomax { alpha: f64, sigma: f64 },
    PowerLaw { alpha: f64, xmin: f64 },
    Pareto { alpha: f64, xm: f64 },
    LogNormal { mu: f64, s: f64 },
    Exponential { lambda: f64 },
    PowerLawCutoff { alpha: f64, lambda: f64, xmin: f64 },
    Poisson { lambda: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive and finite (got {v})")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite (got {v})")))
    }
}

impl DistributionModel {
    pub fn lomax(alpha: f64, sigma: f64) -> Result<Self> {
        Self::Lomax { alpha, sigma }.validated()
    }

    pub fn power_law(alpha: f64, xmin: f64) -> Result<Self> {
        Self::PowerLaw { alpha, xmin }.validated()
    }

    pub fn pareto(alpha: f64, xm: f64) -> Result<Self> {
        Self::Pareto { alpha, xm }.validated()
    }

    pub fn log_normal(mu: f64, s: f64) -> Result<Self> {
        Self::LogNormal { mu, s }.validated()
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::Exponential { lambda }.validated()
    }

    pub fn power_law_cutoff(alpha: f64, lambda: f64, xmin: f64) -> Result<Self> {
        Self::PowerLawCutoff { alpha, lambda, xmin }.validated()
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::Poisson { lambda }.validated()
    }

    /// Checks the family's parameter constraints.
    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionModel::Mlm(p) => MlmParams::new(p.alpha(), p.beta(), p.sigma()).map(|_| ()),
            DistributionModel::Lomax { alpha, sigma } => {
                positive("alpha", alpha)?;
                positive("sigma", sigma)
            }
            DistributionModel::PowerLaw { alpha, xmin } => {
                if !(alpha.is_finite() && alpha > 1.0) {
                    return Err(Error::param(format!("alpha must exceed 1 (got {alpha})")));
                }
                if !(xmin.is_finite() && xmin >= 1.0) {
                    return Err(Error::param(format!("xmin must be at least 1 (got {xmin})")));
                }
                Ok(())
            }
            DistributionModel::Pareto { alpha, xm } => {
                positive("alpha", alpha)?;
                positive("xm", xm)
            }
            DistributionModel::LogNormal { mu, s } => {
                finite("mu", mu)?;
                positive("s", s)
            }
            DistributionModel::Exponential { lambda } => positive("lambda", lambda),
            DistributionModel::PowerLawCutoff { alpha, lambda, xmin } => {
                finite("alpha", alpha)?;
                positive("lambda", lambda)?;
                if !(xmin.is_finite() && xmin >= 1.0) {
                    return Err(Error::param(format!("xmin must be at least 1 (got {xmin})")));
                }
                Ok(())
            }
            DistributionModel::Poisson { lambda } => positive("lambda", lambda),
        }
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        match self {
            DistributionModel::Mlm(_) => Family::Mlm,
            DistributionModel::Lomax { .. } => Family::Lomax,
            DistributionModel::PowerLaw { .. } => Family::PowerLaw,
            DistributionModel::Pareto { .. } => Family::Pareto,
            DistributionModel::LogNormal { .. } => Family::LogNormal,
            DistributionModel::Exponential { .. } => Family::Exponential,
            DistributionModel::PowerLawCutoff { .. } => Family::PowerLawCutoff,
            DistributionModel::Poisson { .. } => Family::Poisson,
        }
    }

    /// Parameter values in the order of [`Family::param_names`].
    pub fn param_values(&self) -> Vec<f64> {
        match *self {
            DistributionModel::Mlm(p) => vec![p.alpha(), p.beta(), p.sigma()],
            DistributionModel::Lomax { alpha, sigma } => vec![alpha, sigma],
            DistributionModel::PowerLaw { alpha, xmin } => vec![alpha, xmin],
            DistributionModel::Pareto { alpha, xm } => vec![alpha, xm],
            DistributionModel::LogNormal { mu, s } => vec![mu, s],
            DistributionModel::Exponential { lambda } => vec![lambda],
            DistributionModel::PowerLawCutoff { alpha, lambda, xmin } => vec![alpha, lambda, xmin],
            DistributionModel::Poisson { lambda } => vec![lambda],
        }
    }

    /// Named parameters, e.g. for JSON output.
    pub fn params(&self) -> BTreeMap<String, f64> {
        self.family()
            .param_names()
            .iter()
            .map(|s| s.to_string())
            .zip(self.param_values())
            .collect()
    }

    /// Builds a model from a family tag and named parameters.
    pub fn from_params(family: Family, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |name: &str| {
            params
                .get(name)
                .copied()
                .ok_or_else(|| Error::param(format!("missing parameter '{name}' for {family}")))
        };
        if let Some(extra) = params.keys().find(|k| !family.param_names().contains(&k.as_str())) {
            return Err(Error::param(format!("unknown parameter '{extra}' for {family}")));
        }
        match family {
            Family::Mlm => Ok(DistributionModel::Mlm(MlmParams::new(get("alpha")?, get("beta")?, get("sigma")?)?)),
            Family::Lomax => Self::lomax(get("alpha")?, get("sigma")?),
            Family::PowerLaw => Self::power_law(get("alpha")?, get("xmin")?),
            Family::Pareto => Self::pareto(get("alpha")?, get("xm")?),
            Family::LogNormal => Self::log_normal(get("mu")?, get("s")?),
            Family::Exponential => Self::exponential(get("lambda")?),
            Family::PowerLawCutoff => Self::power_law_cutoff(get("alpha")?, get("lambda")?, get("xmin")?),
            Family::Poisson => Self::poisson(get("lambda")?),
        }
    }

    /// Smallest point of the support.
    pub fn lower_support(&self) -> f64 {
        match *self {
            DistributionModel::PowerLaw { xmin, .. } | DistributionModel::PowerLawCutoff { xmin, .. } => xmin,
            DistributionModel::Pareto { xm, .. } => xm,
            _ => 0.0,
        }
    }

    /// `ln Z` for the power law with cutoff, `Z = ∫_xmin^∞ x^(−α) e^(−λx) dx`.
    fn cutoff_ln_norm(alpha: f64, lambda: f64, xmin: f64) -> f64 {
        (alpha - 1.0) * lambda.ln() + ln_upper_gamma(1.0 - alpha, lambda * xmin)
    }

    /// Log density (continuous families) or log mass at `round(x)` (Poisson).
    /// Out-of-support points give `−∞`.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            DistributionModel::Mlm(p) => p.ln_pdf(x),
            DistributionModel::Lomax { alpha, sigma } => {
                if x < 0.0 {
                    return f64::NEG_INFINITY;
                }
                alpha.ln() - sigma.ln() - (alpha + 1.0) * (x / sigma).ln_1p()
            }
            DistributionModel::PowerLaw { alpha, xmin } => {
                if x < xmin {
                    return f64::NEG_INFINITY;
                }
                (alpha - 1.0).ln() - xmin.ln() - alpha * (x / xmin).ln()
            }
            DistributionModel::Pareto { alpha, xm } => {
                if x < xm {
                    return f64::NEG_INFINITY;
                }
                alpha.ln() + alpha * xm.ln() - (alpha + 1.0) * x.ln()
            }
            DistributionModel::LogNormal { mu, s } => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let z = (x.ln() - mu) / s;
                -0.5 * z * z - x.ln() - s.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            }
            DistributionModel::Exponential { lambda } => {
                if x < 0.0 {
                    return f64::NEG_INFINITY;
                }
                lambda.ln() - lambda * x
            }
            DistributionModel::PowerLawCutoff { alpha, lambda, xmin } => {
                if x < xmin {
                    return f64::NEG_INFINITY;
                }
                -alpha * x.ln() - lambda * x - Self::cutoff_ln_norm(alpha, lambda, xmin)
            }
            DistributionModel::Poisson { lambda } => {
                let k = x.round();
                if k < 0.0 {
                    return f64::NEG_INFINITY;
                }
                poisson_ln_pmf(k as u64, lambda)
            }
        }
    }

    /// `ln P(X > x)`; for Poisson `ln P(X > floor(x))`.
    pub fn ln_sf(&self, x: f64) -> f64 {
        if x < self.lower_support() {
            return 0.0;
        }
        match *self {
            DistributionModel::Mlm(p) => p.ln_sf(x),
            DistributionModel::Lomax { alpha, sigma } => -alpha * (x / sigma).ln_1p(),
            DistributionModel::PowerLaw { alpha, xmin } => (1.0 - alpha) * (x / xmin).ln(),
            DistributionModel::Pareto { alpha, xm } => alpha * (xm / x).ln(),
            DistributionModel::LogNormal { mu, s } => {
                if x <= 0.0 {
                    0.0
                } else {
                    normal_sf((x.ln() - mu) / s).ln()
                }
            }
            DistributionModel::Exponential { lambda } => -lambda * x,
            DistributionModel::PowerLawCutoff { alpha, lambda, xmin } => {
                ln_upper_gamma(1.0 - alpha, lambda * x) - ln_upper_gamma(1.0 - alpha, lambda * xmin)
            }
            DistributionModel::Poisson { lambda } => {
                poisson_sf_inclusive(x.floor() as u64 + 1, lambda).ln()
            }
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.ln_sf(x).exp().clamp(0.0, 1.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (-self.ln_sf(x).exp_m1()).clamp(0.0, 1.0)
    }

    /// Probability mass assigned to the integer degrees `lo..=hi`
    /// (`hi = None` means unbounded).
    ///
    /// Continuous families use `S(lo − ½) − S(hi + ½)`; the survival below the
    /// support is one, so the lower edge is effectively clamped to the support.
    pub fn degree_mass(&self, lo: u64, hi: Option<u64>) -> f64 {
        if let DistributionModel::Poisson { lambda } = *self {
            let upper = poisson_sf_inclusive(lo, lambda);
            let rest = hi.map_or(0.0, |h| poisson_sf_inclusive(h + 1, lambda));
            return (upper - rest).max(0.0);
        }
        let upper = self.sf(lo as f64 - 0.5);
        let rest = hi.map_or(0.0, |h| self.sf(h as f64 + 0.5));
        (upper - rest).max(0.0)
    }

    /// Probability of degree `k >= 1`: `F(k + ½) − F(max(k − ½, lower support))`
    /// for continuous families and `P(X = k)` for Poisson.
    pub fn interval_pmf(&self, k: u64) -> f64 {
        if let DistributionModel::Poisson { lambda } = *self {
            return poisson_ln_pmf(k, lambda).exp();
        }
        self.degree_mass(k, Some(k))
    }

    /// Draws `n` values. Poisson draws are integers stored as f64.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidInput("sample size must be at least 1".into()));
        }
        match *self {
            DistributionModel::Mlm(p) => p.sample(n, rng),
            DistributionModel::Lomax { alpha, sigma } => {
                Ok((0..n).map(|_| sigma * (-open_unit(rng).ln() / alpha).exp_m1()).collect())
            }
            DistributionModel::PowerLaw { alpha, xmin } => {
                Ok((0..n).map(|_| xmin * open_unit(rng).powf(-1.0 / (alpha - 1.0))).collect())
            }
            DistributionModel::Pareto { alpha, xm } => {
                Ok((0..n).map(|_| xm * open_unit(rng).powf(-1.0 / alpha)).collect())
            }
            DistributionModel::Exponential { lambda } => {
                Ok((0..n).map(|_| -open_unit(rng).ln() / lambda).collect())
            }
            DistributionModel::LogNormal { mu, s } => Ok((0..n)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    (mu + s * z).exp()
                })
                .collect()),
            DistributionModel::Poisson { lambda } => {
                let d = Poisson::new(lambda).map_err(|e| Error::param(e.to_string()))?;
                Ok((0..n).map(|_| d.sample(rng)).collect())
            }
            DistributionModel::PowerLawCutoff { alpha, lambda, xmin } => {
                let sampler = CutoffSampler::new(alpha, lambda, xmin)?;
                Ok((0..n).map(|_| sampler.draw(rng)).collect())
            }
        }
    }
}

/// Rejection sampler for the power law with exponential cutoff.
///
/// Three envelopes are available and the one with the highest expected
/// acceptance rate is used:
///
/// * pure power law (needs `α > 1`): accept with `e^(−λ(x − xmin))`,
///   rate `(α−1) xmin^(α−1) e^(λ xmin) Z`;
/// * shifted exponential `xmin + Exp(λ)` (needs `α >= 0`): accept with
///   `(x/xmin)^(−α)`, rate `λ xmin^α e^(λ xmin) Z`;
/// * untruncated `Gamma(1 − α, λ)` (needs `α < 1`): accept when `x >= xmin`,
///   rate `Γ(1−α, λ xmin)/Γ(1−α)`.
#[derive(Debug, Clone)]
pub struct CutoffSampler {
    alpha: f64,
    lambda: f64,
    xmin: f64,
    envelope: Envelope,
    acceptance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    PowerLaw,
    ShiftedExponential,
    Gamma,
}

impl CutoffSampler {
    pub fn new(alpha: f64, lambda: f64, xmin: f64) -> Result<Self> {
        DistributionModel::power_law_cutoff(alpha, lambda, xmin)?;
        let ln_z = DistributionModel::cutoff_ln_norm(alpha, lambda, xmin);
        let mut candidates = Vec::new();
        if alpha > 1.0 {
            let ln_rate = (alpha - 1.0).ln() + (alpha - 1.0) * xmin.ln() + lambda * xmin + ln_z;
            candidates.push((Envelope::PowerLaw, ln_rate.exp()));
        }
        if alpha >= 0.0 {
            let ln_rate = lambda.ln() + alpha * xmin.ln() + lambda * xmin + ln_z;
            candidates.push((Envelope::ShiftedExponential, ln_rate.exp()));
        }
        if alpha < 1.0 {
            let ln_rate = ln_upper_gamma(1.0 - alpha, lambda * xmin) - ln_gamma(1.0 - alpha);
            candidates.push((Envelope::Gamma, ln_rate.exp()));
        }
        let (envelope, acceptance) = candidates
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one envelope applies for any real alpha");
        if !(acceptance > 1e-9) {
            return Err(Error::Evaluation(format!(
                "power-law-cutoff sampler acceptance rate too small ({acceptance:e})"
            )));
        }
        Ok(Self {
            alpha,
            lambda,
            xmin,
            envelope,
            acceptance: acceptance.min(1.0),
        })
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    /// Expected fraction of proposals accepted.
    pub fn acceptance_rate(&self) -> f64 {
        self.acceptance
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (a, l, m) = (self.alpha, self.lambda, self.xmin);
        loop {
            match self.envelope {
                Envelope::PowerLaw => {
                    let x = m * open_unit(rng).powf(-1.0 / (a - 1.0));
                    if open_unit(rng) < (-l * (x - m)).exp() {
                        return x;
                    }
                }
                Envelope::ShiftedExponential => {
                    let x = m - open_unit(rng).ln() / l;
                    if open_unit(rng) < (x / m).powf(-a) {
                        return x;
                    }
                }
                Envelope::Gamma => {
                    let g = Gamma::new(1.0 - a, 1.0 / l).expect("shape and scale are positive");
                    let x = g.sample(rng);
                    if x >= m {
                        return x;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!("power-law-cutoff".parse::<Family>().unwrap(), Family::PowerLawCutoff);
        assert!("weibull".parse::<Family>().is_err());
    }

    #[test]
    fn constraints_enforced() {
        assert!(DistributionModel::power_law(1.0, 1.0).is_err());
        assert!(DistributionModel::power_law(2.0, 0.5).is_err());
        assert!(DistributionModel::log_normal(f64::NAN, 1.0).is_err());
        assert!(DistributionModel::power_law_cutoff(-0.5, 0.1, 1.0).is_ok());
        assert!(DistributionModel::power_law_cutoff(1.5, 0.0, 1.0).is_err());
        assert!(DistributionModel::poisson(0.0).is_err());
    }

    #[test]
    fn logpdf_examples() {
        let e = DistributionModel::exponential(1.0).unwrap();
        assert_eq!(e.ln_pdf(0.0), 0.0);
        let p = DistributionModel::pareto(2.0, 1.0).unwrap();
        assert!((p.ln_pdf(2.0) - 0.25f64.ln()).abs() < 1e-15);
        assert_eq!(p.ln_pdf(0.5), f64::NEG_INFINITY);
        let po = DistributionModel::poisson(3.0).unwrap();
        assert_eq!(po.ln_pdf(-1.0), f64::NEG_INFINITY);
        assert!((po.ln_pdf(2.2) - po.ln_pdf(2.0)).abs() < 1e-15);
    }

    #[test]
    fn cutoff_logpdf_matches_quadrature_reference() {
        // Normalizer by adaptive quadrature in 60-digit arithmetic.
        let m = DistributionModel::power_law_cutoff(1.5, 0.01, 1.0).unwrap();
        assert!((m.ln_pdf(10.0) - (-4.063988585755942086)).abs() < 1e-10);
        assert!((m.cdf(10.0) - 0.79574791758051558733).abs() < 1e-10);
    }

    #[test]
    fn cdf_examples() {
        assert!((DistributionModel::lomax(1.0, 1.0).unwrap().cdf(1.0) - 0.5).abs() < 1e-15);
        assert!((DistributionModel::log_normal(0.0, 1.0).unwrap().cdf(1.0) - 0.5).abs() < 1e-15);
        assert!((DistributionModel::power_law(2.5, 1.0).unwrap().cdf(4.0) - 0.875).abs() < 1e-15);
        let po = DistributionModel::poisson(2.0).unwrap();
        let direct: f64 = (0..=3).map(|k| poisson_ln_pmf(k, 2.0).exp()).sum();
        assert!((po.cdf(3.0) - direct).abs() < 1e-14);
    }

    #[test]
    fn interval_pmf_examples() {
        let po = DistributionModel::poisson(1.0).unwrap();
        assert!((po.interval_pmf(1) - (-1f64).exp()).abs() < 1e-15);
        let lo = DistributionModel::lomax(1.0, 1.0).unwrap();
        assert!((lo.interval_pmf(1) - (1.0 / 1.5 - 1.0 / 2.5)).abs() < 1e-15);
        let m = DistributionModel::Mlm(MlmParams::new(2.0, -0.36, 30.5).unwrap());
        // CDF difference in 60-digit arithmetic.
        assert!((m.interval_pmf(10) - 0.023057401374402531711).abs() < 1e-14);
        // Support clamping: the power law starts at xmin = 1.
        let pl = DistributionModel::power_law(2.5, 1.0).unwrap();
        assert!((pl.interval_pmf(1) - pl.cdf(1.5)).abs() < 1e-15);
    }

    #[test]
    fn params_round_trip() {
        let models = [
            DistributionModel::Mlm(MlmParams::new(2.0, -0.3, 4.0).unwrap()),
            DistributionModel::lomax(1.2, 3.0).unwrap(),
            DistributionModel::power_law_cutoff(1.7, 0.02, 1.0).unwrap(),
            DistributionModel::log_normal(1.0, 0.5).unwrap(),
        ];
        for m in models {
            let back = DistributionModel::from_params(m.family(), &m.params()).unwrap();
            assert_eq!(back, m);
        }
        let mut bad = BTreeMap::new();
        bad.insert("lambda".to_string(), 1.0);
        bad.insert("sigma".to_string(), 1.0);
        assert!(DistributionModel::from_params(Family::Exponential, &bad).is_err());
    }

    #[test]
    fn sample_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = DistributionModel::exponential(2.0).unwrap().sample(100_000, &mut rng).unwrap();
        let mean = e.iter().sum::<f64>() / e.len() as f64;
        assert!((mean - 0.5).abs() / 0.5 < 0.05);
        let p = DistributionModel::pareto(3.0, 1.0).unwrap().sample(100_000, &mut rng).unwrap();
        let mean = p.iter().sum::<f64>() / p.len() as f64;
        assert!((mean - 1.5).abs() / 1.5 < 0.05);
    }

    #[test]
    fn cutoff_envelope_choice() {
        assert_eq!(CutoffSampler::new(2.5, 1e-4, 1.0).unwrap().envelope(), Envelope::PowerLaw);
        assert_eq!(CutoffSampler::new(-1.0, 0.5, 1.0).unwrap().envelope(), Envelope::Gamma);
        let s = CutoffSampler::new(0.5, 2.0, 5.0).unwrap();
        assert_eq!(s.envelope(), Envelope::ShiftedExponential);
        assert!(s.acceptance_rate() > 0.5);
    }
}
