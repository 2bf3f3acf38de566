//! Numerical checks of the extreme-value behaviour of an MLM tail: regular
//! variation, tail equivalence with a Pareto, heavy tail, classes D and L,
//! subexponentiality and the von Mises condition.
//!
//! ```text
//! cargo run --release --example tail_properties -- [alpha] [beta] [sigma]
//! ```

use mlm_core::distributions::MlmParams;
use mlm_core::tailprops::{run_all, TailCheckOptions};

fn main() -> mlm_core::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let p = match args[..] {
        [a, b, s, ..] => MlmParams::new(a, b, s)?,
        _ => MlmParams::new(2.0, -0.36, 30.5)?,
    };
    let opts = TailCheckOptions {
        mc_pairs: 200_000,
        ..TailCheckOptions::default()
    };
    println!("MLM(α={}, β={}, σ={})", p.alpha(), p.beta(), p.sigma());
    for c in run_all(&p, &opts)? {
        let verdict = match (c.inconclusive, c.converged) {
            (true, _) => "inconclusive",
            (false, true) => "converged",
            (false, false) => "not converged",
        };
        println!("\n{} → {} (limit {}, tolerance {:.0e})", c.name, verdict, c.theoretical, c.tolerance);
        for (x, v) in &c.evaluated {
            println!("    x = {x:>10.3e}   value = {v:.10e}");
        }
    }
    Ok(())
}
