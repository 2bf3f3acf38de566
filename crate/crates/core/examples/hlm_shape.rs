//! The exponent function m(x) = α (L/(1+L))^β, L = ln(1+x), that turns the
//! Lomax exponent into a slowly varying one, and the three conditions it
//! needs to define a valid survival function.
//!
//! ```text
//! cargo run --example hlm_shape
//! ```

use mlm_core::distributions::{hlm_conditions_check, HlmShapeFn};

fn main() -> mlm_core::Result<()> {
    let grid: Vec<f64> = (-2..=12).map(|k| 10f64.powi(k)).collect();
    for (alpha, beta) in [(2.0, -0.5), (2.0, 0.0), (2.0, 1.5), (0.8, -0.9)] {
        let m = HlmShapeFn::new(alpha, beta)?;
        let r = hlm_conditions_check(&m, &grid)?;
        println!(
            "α = {alpha}, β = {beta}: m(1e2) = {:.4}, m(1e12) = {:.4}, approach {:?}",
            m.value(1e2),
            m.value(1e12),
            r.approach
        );
        println!(
            "    positive: {}  tends to α: {} (gap {:.3})  log-derivative bound: {} (margin {:.3})  all: {}",
            r.positive,
            r.approaches_alpha,
            r.final_rel_gap,
            r.log_derivative_bound,
            r.worst_margin,
            r.all_pass()
        );
    }
    Ok(())
}
