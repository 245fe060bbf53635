//! A small Monte Carlo study: bias, variance, and confidence-interval
//! coverage of the four ATE estimators across replications of one
//! experiment design. The `sweep` subcommand runs the same machinery over
//! parameter grids and writes CSV.
//!
//! ```bash
//! cargo run --example coverage_sweep
//! ```

use policy_delta::equivalence::PropensityMode;
use policy_delta::sweep::{run_ab_replications, summarize, SweepEstimator};
use policy_delta::synth::SyntheticConfig;

fn main() -> policy_delta::Result<()> {
    const REPLICATIONS: usize = 400;
    let ate = 0.5;

    for rho in [0.0, 0.8] {
        let cfg = SyntheticConfig::ab(2_000, 1234, 0.5, ate, rho);
        let reps = run_ab_replications(
            &cfg,
            REPLICATIONS,
            &SweepEstimator::ALL,
            PropensityMode::Empirical,
        )?;
        let summaries = summarize(ate, &reps, &SweepEstimator::ALL);

        println!("rho = {rho}, n = {}, {REPLICATIONS} replications:", cfg.n);
        println!("  estimator      bias        emp var      mean est var   coverage");
        for s in &summaries {
            println!(
                "  {:<9} {:>+10.5}   {:>10.3e}   {:>10.3e}     {:.3}",
                s.estimator,
                s.bias,
                s.empirical_variance.unwrap_or(f64::NAN),
                s.mean_estimated_variance,
                s.coverage95
            );
        }
        println!();
    }
    println!("note: dbips tracks dim and ddr tracks radim point-for-point;");
    println!("regression adjustment shrinks the variance by about 1 - rho^2.");
    Ok(())
}
