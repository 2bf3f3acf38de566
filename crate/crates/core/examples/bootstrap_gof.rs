//! Parametric bootstrap chi-square test for a Lomax fit, once on data that
//! really is Lomax and once on data from an MLM with a strong β.
//!
//! ```text
//! cargo run --release --example bootstrap_gof -- [replicates]
//! ```

use mlm_core::distributions::{Family, MlmParams};
use mlm_core::estimation::{fit_model, FitOptions, Sample};
use mlm_core::gof::{bootstrap_pvalue, BootstrapOptions};
use mlm_core::graph_io::DegreeHistogram;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(label: &str, truth: MlmParams, replicates: usize) -> mlm_core::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = DegreeHistogram::from_values(&truth.sample(5_000, &mut rng)?)?;
    let fit = fit_model(&Sample::from_histogram(&h)?, Family::Lomax, &FitOptions::default())?;
    let opts = BootstrapOptions {
        replicates,
        seed: 42,
        ..BootstrapOptions::default()
    };
    let report = bootstrap_pvalue(&h, &fit, &opts, None)?;
    println!(
        "{label:<28} T = {:>9.2} over {:>3} bins, p = {:.4} ({} of {} replicates at least as large)",
        report.statistic,
        report.bins,
        report.p_value,
        report.exceedances,
        report.replicates
    );
    Ok(())
}

fn main() -> mlm_core::Result<()> {
    let replicates: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(199);
    println!("Lomax fit, parametric bootstrap with refits, B = {replicates}");
    run("data: Lomax(2, 30)", MlmParams::lomax(2.0, 30.0)?, replicates)?;
    run("data: MLM(1, 3, 2)", MlmParams::new(1.0, 3.0, 2.0)?, replicates)?;
    Ok(())
}
