//! Counterfactual (off-policy) estimators on logged bandit feedback.
//!
//! All estimators target the value difference `V(pi) - V(pi')` from data
//! logged under a third policy `pi_0`, via the per-record weight
//! `w = (pi(a|x) - pi'(a|x)) / pi_0(a|x)`:
//!
//! * Delta-IPS: mean of `w y`, with the sample variance divided by
//!   `|D| (|D| - 1)`.
//! * Delta-beta-IPS: mean of `w (y - beta)` for an additive control variate
//!   `beta`; unbiased for any constant `beta`.
//! * DR / Delta-DR: importance-weighted model residuals plus the model's
//!   expected value under the target policies.
//!
//! Per-record terms are accumulated in record order, so estimates are
//! reproducible bit for bit for a fixed input.

use crate::data::{Dataset, Framing};
use crate::error::{Error, Result};
use crate::estimate::EstimateResult;
use crate::model::RewardModel;
use crate::onpolicy::sample_mean;
use crate::policy::PolicyTable;

/// One sample's re-weighted, baseline-adjusted outcome `z = w (y - beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedResidual {
    pub z: f64,
}

/// The per-record contributions `z_i = w_i (y_i - beta)` behind the
/// Delta-IPS family, in record order. Useful for diagnostics; the
/// estimators are their mean.
pub fn weighted_residuals(
    d: &Dataset,
    pi: &PolicyTable,
    pi_alt: &PolicyTable,
    beta: f64,
) -> Result<Vec<WeightedResidual>> {
    Ok(weighted_residual_values(d, pi, pi_alt, beta, None)?
        .into_iter()
        .map(|z| WeightedResidual { z })
        .collect())
}

/// `(pi(a|x) - pi'(a|x)) / propensity`.
pub fn delta_weight(
    pi: &PolicyTable,
    pi_alt: &PolicyTable,
    propensity: f64,
    context_id: usize,
    action: usize,
) -> Result<f64> {
    if !(propensity > 0.0) {
        return Err(Error::ZeroPropensity);
    }
    Ok((pi.prob(context_id, action)? - pi_alt.prob(context_id, action)?) / propensity)
}

fn clamp_weight(w: f64, cap: Option<f64>) -> f64 {
    match cap {
        Some(c) => w.clamp(-c, c),
        None => w,
    }
}

/// Mean of `values` together with the variance of that mean,
/// `sum (v - mean)^2 / ((n - dof_loss) n)`.
fn mean_and_variance_of_mean(values: &[f64], dof_loss: u32) -> Result<(f64, f64)> {
    let n = values.len();
    if n <= dof_loss as usize {
        return Err(Error::InsufficientData {
            needed: dof_loss as usize,
            got: n,
        });
    }
    let mean = sample_mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((mean, ss / ((n - dof_loss as usize) as f64 * n as f64)))
}

fn weighted_residual_values(
    d: &Dataset,
    pi: &PolicyTable,
    pi_alt: &PolicyTable,
    beta: f64,
    cap: Option<f64>,
) -> Result<Vec<f64>> {
    d.require_framing(Framing::Ope)?;
    d.records()
        .iter()
        .map(|rec| {
            let w = delta_weight(pi, pi_alt, rec.propensity, rec.context_id, rec.action)?;
            Ok(clamp_weight(w, cap) * (rec.reward - beta))
        })
        .collect()
}

pub(crate) fn delta_ips_estimate_capped(
    d: &Dataset,
    pi: &PolicyTable,
    pi_alt: &PolicyTable,
    ci_level: f64,
    cap: Option<f64>,
) -> Result<EstimateResult> {
    let z = weighted_residual_values(d, pi, pi_alt, 0.0, cap)?;
    let (point, variance_of_mean) = mean_and_variance_of_mean(&z, 1)?;
    EstimateResult::from_moments(point, variance_of_mean, 1, z.len(), ci_level)
}

/// The Delta-IPS estimator: mean of `w y` over the log, with its sample
/// variance divided by `|D| (|D| - 1)`.
pub fn delta_ips_estimate(
    d: &Dataset,
    pi: &PolicyTable,
    pi_alt: &PolicyTable,
    ci_level: f64,
) -> Result<EstimateResult> {
    delta_ips_estimate_capped(d, pi, pi_alt, ci_level, None)
}

// Neumaier-compensated sum; keeps the closed-form baseline identities tight
// on long logs.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// The variance-minimising additive baseline
/// `beta* = sum w^2 y / sum w^2`, estimated from the log.
pub fn estimate_beta_star(d: &Dataset, pi: &PolicyTable, pi_alt: &PolicyTable) -> Result<f64> {
    d.require_framing(Framing::Ope)?;
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let weights = d
        .records()
        .iter()
        .map(|rec| delta_weight(pi, pi_alt, rec.propensity, rec.context_id, rec.action))
        .collect::<Result<Vec<f64>>>()?;
    let denominator = compensated_sum(weights.iter().map(|w| w * w));
    if denominator == 0.0 {
        return Err(Error::DegenerateWeights);
    }
    let numerator = compensated_sum(
        weights
            .iter()
            .zip(d.records())
            .map(|(w, rec)| w * w * rec.reward),
    );
    Ok(numerator / denominator)
}

pub(crate) fn delta_beta_ips_estimate_capped(
    d: &Dataset,
    pi: &PolicyTable,
    pi_alt: &PolicyTable,
    beta: f64,
    dof_loss: u32,
    ci_level: f64,
    cap: Option<f64>,
) -> Result<EstimateResult> {
    let z = weighted_residual_values(d, pi, pi_alt, beta, cap)?;
    let (point, variance_of_mean) = mean_and_variance_of_mean(&z, dof_loss)?;
    EstimateResult::from_moments(point, variance_of_mean, dof_loss, z.len(), ci_level)
}

/// The Delta-beta-IPS estimator: mean of `w (y - beta)`.
///
/// Pass `dof_loss = 2` when `beta` was estimated from the same data (it
/// consumes a degree of freedom on top of the mean), `dof_loss = 1` for an
/// externally supplied constant.
pub fn delta_beta_ips_estimate(
    d: &Dataset,
    pi: &PolicyTable,
    pi_alt: &PolicyTable,
    beta: f64,
    dof_loss: u32,
    ci_level: f64,
) -> Result<EstimateResult> {
    delta_beta_ips_estimate_capped(d, pi, pi_alt, beta, dof_loss, ci_level, None)
}

fn dr_terms(
    d: &Dataset,
    pi: &PolicyTable,
    pi_alt: Option<&PolicyTable>,
    f: &RewardModel,
    cap: Option<f64>,
) -> Result<Vec<f64>> {
    d.require_framing(Framing::Ope)?;
    let action_count = d
        .action_count()
        .ok_or_else(|| Error::UnknownActionSet("dataset has no action count".into()))?;
    let agnostic = f.is_action_agnostic();

    d.records()
        .iter()
        .map(|rec| {
            if !(rec.propensity > 0.0) {
                return Err(Error::ZeroPropensity);
            }
            let target = pi.prob(rec.context_id, rec.action)?;
            let weight = match pi_alt {
                Some(alt) => target - alt.prob(rec.context_id, rec.action)?,
                None => target,
            } / rec.propensity;
            let weight = clamp_weight(weight, cap);
            let residual = rec.reward - f.value(rec, rec.action)?;

            // Model term sum_a (pi - pi') f. For an action-agnostic model in
            // the difference case the policy rows both sum to one, so the
            // term is identically zero and is not summed.
            let correction = match (pi_alt, agnostic) {
                (Some(_), true) => 0.0,
                (None, true) => f.value(rec, rec.action)?,
                _ => {
                    let mut acc = 0.0;
                    for action in 0..action_count {
                        let dp = match pi_alt {
                            Some(alt) => {
                                pi.prob(rec.context_id, action)?
                                    - alt.prob(rec.context_id, action)?
                            }
                            None => pi.prob(rec.context_id, action)?,
                        };
                        acc += dp * f.value(rec, action)?;
                    }
                    acc
                }
            };
            Ok(weight * residual + correction)
        })
        .collect()
}

pub(crate) fn dr_estimate_capped(
    d: &Dataset,
    pi: &PolicyTable,
    f: &RewardModel,
    ci_level: f64,
    cap: Option<f64>,
) -> Result<EstimateResult> {
    let terms = dr_terms(d, pi, None, f, cap)?;
    let (point, variance_of_mean) = mean_and_variance_of_mean(&terms, 1)?;
    EstimateResult::from_moments(point, variance_of_mean, 1, terms.len(), ci_level)
}

/// The doubly robust estimator of a single policy value `V(pi)`:
/// mean of `(pi/pi_0)(y - f(x, a)) + sum_a pi(a|x) f(x, a)`.
pub fn dr_estimate(
    d: &Dataset,
    pi: &PolicyTable,
    f: &RewardModel,
    ci_level: f64,
) -> Result<EstimateResult> {
    dr_estimate_capped(d, pi, f, ci_level, None)
}

pub(crate) fn delta_dr_estimate_capped(
    d: &Dataset,
    pi: &PolicyTable,
    pi_alt: &PolicyTable,
    f: &RewardModel,
    dof_loss: u32,
    ci_level: f64,
    cap: Option<f64>,
) -> Result<EstimateResult> {
    let terms = dr_terms(d, pi, Some(pi_alt), f, cap)?;
    let (point, variance_of_mean) = mean_and_variance_of_mean(&terms, dof_loss)?;
    EstimateResult::from_moments(point, variance_of_mean, dof_loss, terms.len(), ci_level)
}

/// The doubly robust ATE estimator, the difference of two DR estimators over
/// one log. With an action-agnostic model the per-record model term is
/// identically zero, leaving the importance-weighted residuals.
pub fn delta_dr_estimate(
    d: &Dataset,
    pi: &PolicyTable,
    pi_alt: &PolicyTable,
    f: &RewardModel,
    dof_loss: u32,
    ci_level: f64,
) -> Result<EstimateResult> {
    delta_dr_estimate_capped(d, pi, pi_alt, f, dof_loss, ci_level, None)
}

/// `(n - 1) / (n - 2)`: the factor separating the one- and two-degree
/// variance conventions for a baseline estimated from the same data.
pub fn bessel_factor(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    Ok((n - 1) as f64 / (n - 2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::test_support::ope_record;
    use approx::assert_abs_diff_eq;

    fn two_action_log() -> (Dataset, PolicyTable, PolicyTable) {
        let d = Dataset::ope(
            vec![ope_record(0, 0, 1.0, 0.5), ope_record(0, 1, 1.0, 0.5)],
            2,
        )
        .unwrap();
        let pi = PolicyTable::point_mass(1, 2, 0).unwrap();
        let pi_alt = PolicyTable::point_mass(1, 2, 1).unwrap();
        (d, pi, pi_alt)
    }

    #[test]
    fn delta_weight_examples() {
        let pi = PolicyTable::point_mass(1, 2, 0).unwrap();
        let pi_alt = PolicyTable::point_mass(1, 2, 1).unwrap();
        assert_eq!(delta_weight(&pi, &pi_alt, 0.5, 0, 0).unwrap(), 2.0);
        assert_eq!(delta_weight(&pi, &pi, 0.5, 0, 0).unwrap(), 0.0);

        let p = PolicyTable::from_rows(vec![vec![0.3, 0.7]]).unwrap();
        let q = PolicyTable::from_rows(vec![vec![0.7, 0.3]]).unwrap();
        assert_abs_diff_eq!(delta_weight(&p, &q, 0.4, 0, 0).unwrap(), -1.0, epsilon = 1e-12);

        assert!(matches!(
            delta_weight(&pi, &pi_alt, 0.0, 0, 0),
            Err(Error::ZeroPropensity)
        ));
    }

    #[test]
    fn delta_ips_hand_example() {
        let (d, pi, pi_alt) = two_action_log();
        let r = delta_ips_estimate(&d, &pi, &pi_alt, 0.95).unwrap();
        assert_eq!(r.point, 0.0);
        assert_eq!(r.dof_loss, 1);

        let z: Vec<f64> = weighted_residuals(&d, &pi, &pi_alt, 0.0)
            .unwrap()
            .iter()
            .map(|wr| wr.z)
            .collect();
        assert_eq!(z, vec![2.0, -2.0]);
    }

    #[test]
    fn delta_ips_identical_policies() {
        let (d, pi, _) = two_action_log();
        let r = delta_ips_estimate(&d, &pi, &pi, 0.95).unwrap();
        assert_eq!(r.point, 0.0);
        assert_eq!(r.variance_of_mean, 0.0);
    }

    #[test]
    fn delta_ips_requires_ope_framing() {
        let d = Dataset::ab(vec![
            crate::data::test_support::ab_record(0, 1.0, 0.5, "T"),
            crate::data::test_support::ab_record(1, 1.0, 0.5, "C"),
        ])
        .unwrap();
        let pi = PolicyTable::point_mass(2, 2, 0).unwrap();
        assert!(matches!(
            delta_ips_estimate(&d, &pi, &pi, 0.95),
            Err(Error::WrongFraming { .. })
        ));
    }

    #[test]
    fn beta_star_equal_weights_is_plain_mean() {
        let d = Dataset::ope(
            vec![ope_record(0, 0, 1.0, 0.5), ope_record(0, 0, 3.0, 0.5)],
            2,
        )
        .unwrap();
        let pi = PolicyTable::point_mass(1, 2, 0).unwrap();
        let pi_alt = PolicyTable::point_mass(1, 2, 1).unwrap();
        assert_eq!(estimate_beta_star(&d, &pi, &pi_alt).unwrap(), 2.0);
    }

    #[test]
    fn beta_star_degenerate_when_policies_match() {
        let (d, pi, _) = two_action_log();
        assert!(matches!(
            estimate_beta_star(&d, &pi, &pi),
            Err(Error::DegenerateWeights)
        ));
    }

    #[test]
    fn delta_beta_with_zero_baseline_matches_delta_ips() {
        let d = Dataset::ope(
            vec![
                ope_record(0, 0, 1.5, 0.4),
                ope_record(0, 1, -0.5, 0.6),
                ope_record(0, 0, 2.5, 0.4),
            ],
            2,
        )
        .unwrap();
        let pi = PolicyTable::from_rows(vec![vec![0.9, 0.1]]).unwrap();
        let pi_alt = PolicyTable::from_rows(vec![vec![0.2, 0.8]]).unwrap();
        let ips = delta_ips_estimate(&d, &pi, &pi_alt, 0.95).unwrap();
        let beta0 = delta_beta_ips_estimate(&d, &pi, &pi_alt, 0.0, 1, 0.95).unwrap();
        assert_eq!(ips.point, beta0.point);
        assert_eq!(ips.variance_of_mean, beta0.variance_of_mean);
    }

    #[test]
    fn delta_beta_identical_policies_point_zero_for_any_beta() {
        let (d, pi, _) = two_action_log();
        for beta in [-10.0, 0.0, 3.25] {
            let r = delta_beta_ips_estimate(&d, &pi, &pi, beta, 1, 0.95).unwrap();
            assert_eq!(r.point, 0.0);
        }
    }

    #[test]
    fn dr_with_zero_model_is_single_policy_ips() {
        let d = Dataset::ope(
            vec![ope_record(0, 0, 2.0, 0.4), ope_record(0, 1, 1.0, 0.6)],
            2,
        )
        .unwrap();
        let pi = PolicyTable::from_rows(vec![vec![0.8, 0.2]]).unwrap();
        let r = dr_estimate(&d, &pi, &RewardModel::constant(0.0), 0.95).unwrap();
        // mean of (pi/pi_0) y = ((0.8/0.4)*2 + (0.2/0.6)*1) / 2
        assert_abs_diff_eq!(r.point, (4.0 + 1.0 / 3.0) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn dr_with_oracle_model_uses_model_term_only() {
        // Deterministic rewards r[x][a]; f equals them exactly.
        let rewards = vec![vec![1.0, 3.0], vec![0.0, 2.0]];
        let d = Dataset::ope(
            vec![
                ope_record(0, 0, 1.0, 0.5),
                ope_record(0, 1, 3.0, 0.5),
                ope_record(1, 0, 0.0, 0.5),
                ope_record(1, 1, 2.0, 0.5),
            ],
            2,
        )
        .unwrap();
        let f = RewardModel::ActionTable { values: rewards };
        let pi = PolicyTable::from_rows(vec![vec![0.25, 0.75], vec![0.5, 0.5]]).unwrap();
        let r = dr_estimate(&d, &pi, &f, 0.95).unwrap();
        // Residual terms vanish; the point is the mean of sum_a pi f.
        let expected = ((0.25 * 1.0 + 0.75 * 3.0) * 2.0 + (0.5 * 0.0 + 0.5 * 2.0) * 2.0) / 4.0;
        assert_abs_diff_eq!(r.point, expected, epsilon = 1e-15);
    }

    #[test]
    fn delta_dr_with_zero_model_matches_delta_ips_exactly() {
        let d = Dataset::ope(
            vec![
                ope_record(0, 0, 2.0, 0.4),
                ope_record(1, 1, 1.0, 0.6),
                ope_record(0, 1, -1.0, 0.6),
            ],
            2,
        )
        .unwrap();
        let pi = PolicyTable::from_rows(vec![vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap();
        let pi_alt = PolicyTable::from_rows(vec![vec![0.1, 0.9], vec![0.5, 0.5]]).unwrap();
        let ips = delta_ips_estimate(&d, &pi, &pi_alt, 0.95).unwrap();
        let ddr =
            delta_dr_estimate(&d, &pi, &pi_alt, &RewardModel::constant(0.0), 1, 0.95).unwrap();
        assert_eq!(ips.point, ddr.point);
        assert_eq!(ips.variance_of_mean, ddr.variance_of_mean);
    }

    #[test]
    fn exhaustive_enumeration_recovers_true_ate() {
        // Every (x, a) pair once under uniform logging: sample averages are
        // population expectations, so IPS and DR are exact, any model.
        let rewards = vec![vec![1.0, 3.0], vec![0.0, 2.0]];
        let d = Dataset::ope(
            vec![
                ope_record(0, 0, 1.0, 0.5),
                ope_record(0, 1, 3.0, 0.5),
                ope_record(1, 0, 0.0, 0.5),
                ope_record(1, 1, 2.0, 0.5),
            ],
            2,
        )
        .unwrap();
        let pi = PolicyTable::from_rows(vec![vec![0.9, 0.1], vec![0.6, 0.4]]).unwrap();
        let pi_alt = PolicyTable::uniform(2, 2).unwrap();
        let dgp = crate::oracle::DiscreteDgp::uniform_contexts(rewards).unwrap();
        let truth = crate::oracle::true_ate(&dgp, &pi, &pi_alt).unwrap();

        let ips = delta_ips_estimate(&d, &pi, &pi_alt, 0.95).unwrap();
        assert_abs_diff_eq!(ips.point, truth, epsilon = 1e-12);

        let misspecified = RewardModel::ActionTable {
            values: vec![vec![2.0, -1.0], vec![0.5, 0.5]],
        };
        let ddr = delta_dr_estimate(&d, &pi, &pi_alt, &misspecified, 1, 0.95).unwrap();
        assert_abs_diff_eq!(ddr.point, truth, epsilon = 1e-12);
    }

    #[test]
    fn bessel_factor_examples() {
        assert_eq!(bessel_factor(10).unwrap(), 1.125);
        assert_eq!(bessel_factor(3).unwrap(), 2.0);
        assert_abs_diff_eq!(bessel_factor(1_000_000).unwrap(), 1.0, epsilon = 1e-5);
        assert!(matches!(bessel_factor(2), Err(Error::InsufficientData { .. })));
    }
}
