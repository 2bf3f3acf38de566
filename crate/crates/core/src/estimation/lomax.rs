//! Lomax profile likelihood.
//!
//! For fixed `σ` the Lomax log-likelihood is maximized in closed form by
//! `α(σ) = n / Σ ln(1 + x_i/σ)`. Substituting gives the per-observation
//! profile
//!
//! ```text
//! ℓ_p(σ) = ln α(σ) − ln σ − 1 − 1/α(σ),
//! ```
//!
//! which tends to `ln(1/x̄) − 1` (the exponential fit) as `σ → ∞`.

use super::sample::Sample;

/// `ln(1 + r) − r/(1 + r)`, accurate for small `r`.
fn log_minus_ratio(r: f64) -> f64 {
    if r < 1e-3 {
        // Σ_{k≥2} (−1)^k (k−1)/k r^k; eight terms reach full precision here.
        let mut sum = 0.0;
        let mut pow = r * r;
        for k in 2..10 {
            let kf = k as f64;
            let term = (kf - 1.0) / kf * pow;
            sum += if k % 2 == 0 { term } else { -term };
            pow *= r;
        }
        sum
    } else {
        r.ln_1p() - r / (1.0 + r)
    }
}

/// `α(σ) = n / Σ ln(1 + x_i/σ)`.
pub fn lomax_alpha_of_sigma(s: &Sample, sigma: f64) -> f64 {
    s.n() as f64 / s.weighted_sum(|x| (x / sigma).ln_1p())
}

/// Per-observation profile log-likelihood `ℓ_p(σ)`.
pub fn lomax_profile_loglik(s: &Sample, sigma: f64) -> f64 {
    let n = s.n() as f64;
    let a = s.weighted_sum(|x| (x / sigma).ln_1p());
    (n / (a * sigma)).ln() - 1.0 - a / n
}

/// Analytic derivative `dℓ_p/dσ`.
///
/// With `A = Σ ln(1 + x/σ)` and `B = Σ x/(σ + x)`,
/// `ℓ_p'(σ) = −(A − B)/(σ A) + B/(nσ)`. `A − B` is summed term by term so the
/// derivative keeps its relative accuracy for `σ` far above the data.
pub fn lomax_profile_slope(s: &Sample, sigma: f64) -> f64 {
    let n = s.n() as f64;
    let a = s.weighted_sum(|x| (x / sigma).ln_1p());
    let b = s.weighted_sum(|x| x / (sigma + x));
    let a_minus_b = s.weighted_sum(|x| log_minus_ratio(x / sigma));
    -a_minus_b / (sigma * a) + b / (n * sigma)
}

/// `½ Σx²/Σx − x̄`, the limit of `−σ² ℓ_p'(σ)` as `σ → ∞`. Positive exactly
/// when the coefficient of variation exceeds one.
pub fn lomax_slope_limit(s: &Sample) -> f64 {
    let sx = s.weighted_sum(|x| x);
    let sxx = s.weighted_sum(|x| x * x);
    0.5 * sxx / sx - s.mean()
}

/// Location of the profile maximum.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ProfileMax {
    pub sigma: f64,
    pub alpha: f64,
    /// False when the best grid point sits on the upper edge of the search
    /// range, i.e. the profile is still rising toward the exponential limit.
    pub interior: bool,
    pub iterations: usize,
}

/// Maximizes `ℓ_p` over `ln σ`: a log-spaced grid locates the peak, then
/// bisection on the analytic slope pins it down.
pub(crate) fn maximize_profile(s: &Sample) -> ProfileMax {
    let lo = (s.min() * 1e-6).ln();
    let hi = (s.max() * 1e8).ln();
    const GRID: usize = 240;
    let grid: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&t| lomax_profile_loglik(s, t.exp())).collect();
    let best = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(GRID, |(i, _)| i);

    if best == GRID || best == 0 {
        let sigma = grid[best].exp();
        return ProfileMax {
            sigma,
            alpha: lomax_alpha_of_sigma(s, sigma),
            interior: false,
            iterations: GRID + 1,
        };
    }

    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let mut iterations = GRID + 1;
    // ℓ_p' > 0 left of the peak and < 0 right of it.
    while b - a > 1e-15 * a.abs().max(1.0) && iterations < GRID + 200 {
        let m = 0.5 * (a + b);
        if lomax_profile_slope(s, m.exp()) > 0.0 {
            a = m;
        } else {
            b = m;
        }
        iterations += 1;
    }
    let sigma = (0.5 * (a + b)).exp();
    ProfileMax {
        sigma,
        alpha: lomax_alpha_of_sigma(s, sigma),
        interior: true,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skewed() -> Sample {
        let mut v = vec![1.0; 30];
        v.extend([2.0; 10]);
        v.extend([5.0, 9.0, 40.0, 120.0]);
        Sample::from_values(v).unwrap()
    }

    #[test]
    fn alpha_of_sigma_examples() {
        let s = Sample::from_values(vec![1.0; 3]).unwrap();
        assert!((lomax_alpha_of_sigma(&s, 1.0) - 1.0 / 2f64.ln()).abs() < 1e-14);
        let s = skewed();
        let sigma = 1e8;
        let rel = (lomax_alpha_of_sigma(&s, sigma) / sigma * s.mean() - 1.0).abs();
        assert!(rel < 1e-3);
    }

    #[test]
    fn slope_matches_difference_quotient() {
        let s = skewed();
        for &sigma in &[0.3, 2.0, 17.0, 400.0] {
            let h = 1e-5 * sigma;
            let fd = (lomax_profile_loglik(&s, sigma + h) - lomax_profile_loglik(&s, sigma - h)) / (2.0 * h);
            let an = lomax_profile_slope(&s, sigma);
            assert!(((an - fd) / fd).abs() < 1e-6, "σ={sigma}: {an} vs {fd}");
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        let r: f64 = 1e-3;
        let direct = r.ln_1p() - r / (1.0 + r);
        assert!(((log_minus_ratio(r * (1.0 - 1e-12)) - direct) / direct).abs() < 1e-8);
    }

    #[test]
    fn profile_limits() {
        let s = skewed();
        let big = 1e8 * s.max();
        let l0 = (1.0 / s.mean()).ln() - 1.0;
        assert!((lomax_profile_loglik(&s, big) - l0).abs() < 1e-3);
        // Toward σ = 0 the profile falls like −ln ln(1/σ) − 1 − mean(ln x).
        let mean_ln = s.weighted_sum(f64::ln) / s.n() as f64;
        let tiny: f64 = 1e-300;
        let asymptote = -(1.0 / tiny).ln().ln() - 1.0 - mean_ln;
        assert!((lomax_profile_loglik(&s, tiny) - asymptote).abs() < 0.02);
        assert!(lomax_profile_loglik(&s, 1e-300) < lomax_profile_loglik(&s, 1e-12));
        let limit = lomax_slope_limit(&s);
        let sigma = 1e6 * s.max();
        let approx = -sigma * sigma * lomax_profile_slope(&s, sigma);
        assert!(((approx - limit) / limit).abs() < 1e-2);
    }

    #[test]
    fn finds_interior_peak_on_skewed_data() {
        let s = skewed();
        let m = maximize_profile(&s);
        assert!(m.interior);
        assert!(lomax_profile_slope(&s, m.sigma).abs() < 1e-9);
    }

    #[test]
    fn low_cv_sample_runs_to_the_boundary() {
        let s = Sample::from_values(vec![4.0, 5.0, 6.0, 5.0, 4.5]).unwrap();
        assert!(!maximize_profile(&s).interior);
    }
}
