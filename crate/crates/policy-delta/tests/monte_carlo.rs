//! Statistical checks that need replication: unbiasedness of the estimators
//! under their DGPs, the variance ordering bought by a correlated reward
//! model, and calibration of the generators themselves.

use policy_delta::equivalence::PropensityMode;
use policy_delta::io::{write_dataset_to, FileFormat};
use policy_delta::model::RewardModel;
use policy_delta::offpolicy::{delta_dr_estimate, delta_ips_estimate};
use policy_delta::oracle::true_ate;
use policy_delta::policy::PolicyTable;
use policy_delta::sweep::{run_ab_replications, SweepEstimator};
use policy_delta::synth::{gen_ab_experiment, gen_bandit_logs, SyntheticConfig};

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}

#[test]
fn radim_is_unbiased_even_with_a_biased_misscaled_model() {
    // A model with the wrong intercept and slope still yields an unbiased
    // ATE estimate; the bias appears on both arms and cancels.
    const REPLICATIONS: usize = 2000;
    let ate = 0.7;
    let base = SyntheticConfig::ab(200, 9001, 0.5, ate, 0.5);
    let mut points = Vec::with_capacity(REPLICATIONS);
    for i in 0..REPLICATIONS {
        let (exp, _) = gen_ab_experiment(&base.replication(i as u64)).unwrap();
        let (d_t, d_c) = exp.split().unwrap();
        let bad_model = RewardModel::Linear {
            intercept: 1.3,
            coefficients: vec![0.9],
        };
        points.push(
            policy_delta::onpolicy::radim_estimate(&d_t, &d_c, &bad_model, 0.95)
                .unwrap()
                .point,
        );
    }
    let se_of_mean = (variance(&points) / REPLICATIONS as f64).sqrt();
    assert!(
        (mean(&points) - ate).abs() < 4.0 * se_of_mean,
        "mean {} vs ate {ate} (4 se = {})",
        mean(&points),
        4.0 * se_of_mean
    );
}

#[test]
fn delta_ips_is_unbiased_on_bandit_logs() {
    const REPLICATIONS: usize = 2000;
    let table = vec![vec![1.0, 0.2, -0.5], vec![0.0, 1.5, 0.5], vec![2.0, 0.0, 1.0]];
    let base = SyntheticConfig::bandit(300, 4242, table, 2.0, 0.5);
    let pi = PolicyTable::from_rows(vec![
        vec![0.7, 0.2, 0.1],
        vec![0.1, 0.8, 0.1],
        vec![0.3, 0.3, 0.4],
    ])
    .unwrap();
    let pi_alt = PolicyTable::uniform(3, 3).unwrap();
    let truth = true_ate(&base.discrete_dgp().unwrap(), &pi, &pi_alt).unwrap();

    let mut points = Vec::with_capacity(REPLICATIONS);
    for i in 0..REPLICATIONS {
        let (d, _) = gen_bandit_logs(&base.replication(i as u64)).unwrap();
        points.push(delta_ips_estimate(&d, &pi, &pi_alt, 0.95).unwrap().point);
    }
    let se_of_mean = (variance(&points) / REPLICATIONS as f64).sqrt();
    assert!(
        (mean(&points) - truth).abs() < 4.0 * se_of_mean,
        "mean {} vs truth {truth} (4 se = {})",
        mean(&points),
        4.0 * se_of_mean
    );
}

#[test]
fn correlated_model_makes_delta_dr_no_worse_than_delta_ips() {
    const REPLICATIONS: usize = 2000;
    let table = vec![vec![1.0, 0.2, -0.5], vec![0.0, 1.5, 0.5], vec![2.0, 0.0, 1.0]];
    let base = SyntheticConfig::bandit(300, 1717, table.clone(), 2.0, 0.5);
    let pi = PolicyTable::from_rows(vec![
        vec![0.7, 0.2, 0.1],
        vec![0.1, 0.8, 0.1],
        vec![0.3, 0.3, 0.4],
    ])
    .unwrap();
    let pi_alt = PolicyTable::uniform(3, 3).unwrap();
    // Misspecified but correlated with the truth.
    let model = RewardModel::ActionTable {
        values: table
            .iter()
            .map(|row| row.iter().map(|v| 0.7 * v + 0.2).collect())
            .collect(),
    };

    let mut ips_points = Vec::with_capacity(REPLICATIONS);
    let mut dr_points = Vec::with_capacity(REPLICATIONS);
    for i in 0..REPLICATIONS {
        let (d, _) = gen_bandit_logs(&base.replication(i as u64)).unwrap();
        ips_points.push(delta_ips_estimate(&d, &pi, &pi_alt, 0.95).unwrap().point);
        dr_points.push(
            delta_dr_estimate(&d, &pi, &pi_alt, &model, 1, 0.95)
                .unwrap()
                .point,
        );
    }
    let ratio = variance(&dr_points) / variance(&ips_points);
    assert!(ratio < 1.0, "variance ratio {ratio} should be below 1");
}

#[test]
fn dbeta_ips_tracks_dim_across_replications() {
    let base = SyntheticConfig::ab(500, 7, 0.3, 0.5, 0.6);
    let reps = run_ab_replications(
        &base,
        200,
        &[SweepEstimator::Dim, SweepEstimator::DBetaIps],
        PropensityMode::Empirical,
    )
    .unwrap();
    for row in &reps {
        assert!((row[0].point - row[1].point).abs() < 1e-11);
    }
}

#[test]
fn dim_lands_within_three_stderr_of_the_configured_truth() {
    let cfg = SyntheticConfig::ab(100_000, 1, 0.5, 0.5, 0.3);
    let (exp, _) = gen_ab_experiment(&cfg).unwrap();
    let (d_t, d_c) = exp.split().unwrap();
    let est = policy_delta::onpolicy::dim_estimate(&d_t, &d_c, 0.95).unwrap();
    assert!(
        (est.point - 0.5).abs() < 3.0 * est.stderr,
        "point {} stderr {}",
        est.point,
        est.stderr
    );
}

#[test]
fn residual_variance_ratio_follows_the_design() {
    use policy_delta::onpolicy::residual_variance_ratio;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    // Null effect keeps the pooled correlation at the design value.
    let cfg = SyntheticConfig::ab(100_000, 77, 0.5, 0.0, 0.8);
    let (exp, model) = gen_ab_experiment(&cfg).unwrap();
    let y = exp.dataset().rewards();
    let fx: Vec<f64> = exp
        .dataset()
        .records()
        .iter()
        .map(|rec| model.agnostic_value(rec).unwrap())
        .collect();
    let ratio = residual_variance_ratio(&y, &fx).unwrap();
    assert!((ratio - 0.36).abs() < 0.02, "ratio = {ratio}");

    // Against pure noise the adjustment buys nothing.
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let noise: Vec<f64> = (0..y.len()).map(|_| rng.sample(StandardNormal)).collect();
    let ratio = residual_variance_ratio(&y, &noise).unwrap();
    assert!((ratio - 1.0).abs() < 0.01, "ratio = {ratio}");
}

#[test]
fn generated_correlation_matches_the_configured_rho() {
    // ate = 0 so the pooled correlation equals the within-arm design value.
    let cfg = SyntheticConfig::ab(1_000_000, 31, 0.5, 0.0, 0.8);
    let (exp, model) = gen_ab_experiment(&cfg).unwrap();
    let y: Vec<f64> = exp.dataset().rewards();
    let fx: Vec<f64> = exp
        .dataset()
        .records()
        .iter()
        .map(|rec| model.agnostic_value(rec).unwrap())
        .collect();
    let my = mean(&y);
    let mf = mean(&fx);
    let cov: f64 = y.iter().zip(&fx).map(|(a, b)| (a - my) * (b - mf)).sum();
    let corr = cov / (variance(&y) * variance(&fx)).sqrt() / (y.len() - 1) as f64;
    assert!((corr - 0.8).abs() < 0.005, "corr = {corr}");
}

#[test]
fn realized_treatment_fraction_matches_p() {
    let cfg = SyntheticConfig::ab(1_000_000, 57, 0.3, 0.5, 0.0);
    let (exp, _) = gen_ab_experiment(&cfg).unwrap();
    let p_hat = exp.empirical_p().unwrap();
    assert!((p_hat - 0.3).abs() < 0.002, "p_hat = {p_hat}");
}

#[test]
fn identical_configs_serialize_byte_identically() {
    let cfg = SyntheticConfig::bandit(500, 99, vec![vec![1.0, 0.0], vec![0.5, 2.0]], 1.5, 0.3);
    let mut first = Vec::new();
    let mut second = Vec::new();
    let (d1, _) = gen_bandit_logs(&cfg).unwrap();
    let (d2, _) = gen_bandit_logs(&cfg).unwrap();
    write_dataset_to(&d1, FileFormat::JsonLines, &mut first).unwrap();
    write_dataset_to(&d2, FileFormat::JsonLines, &mut second).unwrap();
    assert_eq!(first, second);
}
