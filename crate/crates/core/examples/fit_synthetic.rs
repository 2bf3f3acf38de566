//! Draws a sample from a known Modified Lomax distribution, fits it back and
//! prints the estimates with 95% confidence intervals.
//!
//! ```text
//! cargo run --release --example fit_synthetic -- [n] [seed]
//! ```

use std::time::Instant;

use mlm_core::distributions::MlmParams;
use mlm_core::estimation::{fit_mlm, FitOptions, Sample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mlm_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);

    let truth = MlmParams::new(2.0, -0.36, 30.5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = Sample::from_values(truth.sample(n, &mut rng)?)?;

    let started = Instant::now();
    let fit = fit_mlm(&sample, &MlmParams::new(1.0, 0.0, 1.0)?, &FitOptions::default())?;
    let elapsed = started.elapsed();

    println!("n = {n}, seed = {seed}, fitted in {:.2?}", elapsed);
    println!("converged = {}, iterations = {}, |score|∞ = {:.2e}", fit.converged, fit.iterations, fit.grad_norm);
    println!("loglik = {:.6} ({:.6} per observation)", fit.loglik, fit.loglik_per_obs());
    println!("CV = {:.4}, finite maximum guaranteed: {}", fit.cv, fit.existence_ok);
    let truth_values = [truth.alpha(), truth.beta(), truth.sigma()];
    if let Some(ci) = &fit.intervals {
        println!("{:>6} {:>10} {:>10} {:>22}", "param", "truth", "estimate", "95% interval");
        for (c, t) in ci.iter().zip(truth_values) {
            println!("{:>6} {:>10.4} {:>10.4}   [{:>8.4}, {:>8.4}]", c.name, t, c.estimate, c.low, c.high);
        }
    } else if let Some(msg) = &fit.message {
        println!("no intervals: {msg}");
    }
    Ok(())
}
