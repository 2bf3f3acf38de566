//! Density, survival function and quantiles of a Modified Lomax
//! distribution, compared with the Lomax distribution that shares α and σ.
//!
//! ```text
//! cargo run --example mlm_distribution -- [alpha] [beta] [sigma]
//! ```

use mlm_core::distributions::MlmParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mlm_core::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (alpha, beta, sigma) = match args[..] {
        [a, b, s, ..] => (a, b, s),
        _ => (1.5, -0.4, 10.0),
    };
    let p = MlmParams::new(alpha, beta, sigma)?;
    let lomax = MlmParams::lomax(alpha, sigma)?;

    println!("MLM(α={alpha}, β={beta}, σ={sigma}) against Lomax(α={alpha}, σ={sigma})");
    println!("{:>10} {:>14} {:>14} {:>14} {:>14}", "x", "pdf", "sf", "lomax pdf", "lomax sf");
    for x in [0.1, 1.0, 5.0, 10.0, 50.0, 100.0, 1e3, 1e4, 1e6] {
        println!(
            "{x:>10} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            p.pdf(x)?,
            p.sf(x),
            lomax.pdf(x)?,
            lomax.sf(x)
        );
    }

    println!("\nquantiles (and the survival probability at each):");
    for u in [0.1, 0.5, 0.9, 0.99, 0.999] {
        let q = p.quantile(u)?;
        println!("  u = {u:<6} x = {q:>14.6}  1 − S(x) = {:.12}", 1.0 - p.sf(q));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws = p.sample(100_000, &mut rng)?;
    let above = draws.iter().filter(|&&x| x > sigma).count() as f64 / draws.len() as f64;
    println!("\nP(X > σ): exact {:.5}, from 100000 draws {:.5}", p.sf(sigma), above);
    Ok(())
}
