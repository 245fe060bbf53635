//! Exact enumeration: when every (context, action) pair appears with
//! multiplicity proportional to its logging probability and rewards are
//! noiseless, sample averages are population expectations, so the unbiased
//! estimators reproduce the true policy values to machine precision.
//!
//! ```bash
//! cargo run --example exhaustive_oracle
//! ```

use policy_delta::model::RewardModel;
use policy_delta::offpolicy::{delta_dr_estimate, delta_ips_estimate};
use policy_delta::oracle::true_ate;
use policy_delta::policy::PolicyTable;
use policy_delta::synth::{exhaustive_dataset, SyntheticConfig};

fn main() -> policy_delta::Result<()> {
    let reward_table = vec![vec![1.0, 3.0, -0.5], vec![0.0, 2.0, 1.0]];
    // Logging probabilities are small rationals, so the enumeration is exact.
    let logging = vec![vec![0.2, 0.3, 0.5], vec![0.25, 0.25, 0.5]];
    let cfg = SyntheticConfig::bandit(0, 0, reward_table, 1.0, 0.0)
        .with_logging_policy(logging);

    let d = exhaustive_dataset(&cfg)?;
    println!("enumerated {} records over 2 contexts x 3 actions", d.len());
    for rec in d.records().iter().take(6) {
        println!(
            "  context {} action {} reward {:+.2} propensity {:.2}",
            rec.context_id, rec.action, rec.reward, rec.propensity
        );
    }

    let pi = PolicyTable::from_rows(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.8, 0.1]])?;
    let pi_alt = PolicyTable::uniform(2, 3)?;
    let truth = true_ate(&cfg.discrete_dgp()?, &pi, &pi_alt)?;

    let ips = delta_ips_estimate(&d, &pi, &pi_alt, 0.95)?;
    // Even a nonsense reward model cannot bias DR on an exact enumeration.
    let nonsense = RewardModel::ActionTable {
        values: vec![vec![9.0, -9.0, 4.0], vec![-2.0, 7.0, 0.5]],
    };
    let ddr = delta_dr_estimate(&d, &pi, &pi_alt, &nonsense, 1, 0.95)?;

    println!("\ntrue value difference : {truth:+.12}");
    println!("delta-IPS             : {:+.12}  (|error| = {:.1e})", ips.point, (ips.point - truth).abs());
    println!("delta-DR, bad model   : {:+.12}  (|error| = {:.1e})", ddr.point, (ddr.point - truth).abs());
    Ok(())
}
