//! Counterfactual evaluation on logged bandit feedback: estimate the value
//! difference between two policies that were never deployed, from data
//! logged under a third.
//!
//! ```bash
//! cargo run --example bandit_logs
//! ```

use policy_delta::model::RewardModel;
use policy_delta::offpolicy::{
    delta_beta_ips_estimate, delta_dr_estimate, delta_ips_estimate, dr_estimate,
    estimate_beta_star,
};
use policy_delta::oracle::{true_ate, true_policy_value};
use policy_delta::policy::PolicyTable;
use policy_delta::synth::{gen_bandit_logs, SyntheticConfig};

fn main() -> policy_delta::Result<()> {
    // Three contexts, three actions, mildly skewed softmax logging.
    let reward_table = vec![
        vec![1.0, 0.2, -0.5],
        vec![0.0, 1.5, 0.5],
        vec![2.0, 0.0, 1.0],
    ];
    let cfg = SyntheticConfig::bandit(50_000, 13, reward_table.clone(), 2.0, 0.5);
    let (log, logging_policy) = gen_bandit_logs(&cfg)?;
    println!(
        "logged {} interactions under a softmax policy; first row: {:?}",
        log.len(),
        logging_policy.row(0)?
    );

    // Two candidate policies to compare offline.
    let pi = PolicyTable::from_rows(vec![
        vec![0.7, 0.2, 0.1],
        vec![0.1, 0.8, 0.1],
        vec![0.3, 0.3, 0.4],
    ])?;
    let pi_alt = PolicyTable::uniform(3, 3)?;

    let dgp = cfg.discrete_dgp()?;
    let truth = true_ate(&dgp, &pi, &pi_alt)?;
    println!(
        "\ntrue values: V(pi) = {:+.4}, V(pi') = {:+.4}, difference = {truth:+.4}",
        true_policy_value(&dgp, &pi)?,
        true_policy_value(&dgp, &pi_alt)?
    );

    let ips = delta_ips_estimate(&log, &pi, &pi_alt, 0.95)?;
    println!("\ndelta-IPS           : {:+.4} +- {:.4}", ips.point, ips.stderr);

    let beta = estimate_beta_star(&log, &pi, &pi_alt)?;
    let beta_ips = delta_beta_ips_estimate(&log, &pi, &pi_alt, beta, 2, 0.95)?;
    println!(
        "delta-beta*-IPS     : {:+.4} +- {:.4}   (beta* = {beta:+.4})",
        beta_ips.point, beta_ips.stderr
    );

    // A decent but misspecified reward model tightens things further.
    let model = RewardModel::ActionTable {
        values: reward_table
            .iter()
            .map(|row| row.iter().map(|v| 0.8 * v + 0.1).collect())
            .collect(),
    };
    let ddr = delta_dr_estimate(&log, &pi, &pi_alt, &model, 1, 0.95)?;
    println!("delta-DR            : {:+.4} +- {:.4}", ddr.point, ddr.stderr);

    let single = dr_estimate(&log, &pi, &model, 0.95)?;
    println!(
        "DR value of pi alone: {:+.4} +- {:.4}   (truth {:+.4})",
        single.point,
        single.stderr,
        true_policy_value(&dgp, &pi)?
    );
    Ok(())
}
