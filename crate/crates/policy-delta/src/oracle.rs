//! Exact policy values on small discrete instances, by exhaustive
//! enumeration. The testing ground truth for every estimator in the crate.

use crate::error::{Error, Result};
use crate::policy::PolicyTable;

/// A fully known discrete data-generating process: a context distribution
/// `P(x)` and conditional mean rewards `E[Y | x, a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDgp {
    context_probs: Vec<f64>,
    mean_rewards: Vec<Vec<f64>>,
}

impl DiscreteDgp {
    pub fn new(context_probs: Vec<f64>, mean_rewards: Vec<Vec<f64>>) -> Result<Self> {
        if context_probs.is_empty() || context_probs.len() != mean_rewards.len() {
            return Err(Error::InvalidConfig(
                "context distribution and reward table must have the same positive length".into(),
            ));
        }
        let sum: f64 = context_probs.iter().sum();
        if context_probs.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "context probabilities must be non-negative and sum to 1, got sum {sum}"
            )));
        }
        let action_count = mean_rewards[0].len();
        if action_count == 0 || mean_rewards.iter().any(|row| row.len() != action_count) {
            return Err(Error::InvalidConfig(
                "reward table must be rectangular with at least one action".into(),
            ));
        }
        if mean_rewards.iter().flatten().any(|r| !r.is_finite()) {
            return Err(Error::NonFiniteExpectedReward);
        }
        Ok(DiscreteDgp {
            context_probs,
            mean_rewards,
        })
    }

    /// Uniform context distribution over the table's contexts.
    pub fn uniform_contexts(mean_rewards: Vec<Vec<f64>>) -> Result<Self> {
        let n = mean_rewards.len();
        if n == 0 {
            return Err(Error::InvalidConfig("reward table has no contexts".into()));
        }
        Self::new(vec![1.0 / n as f64; n], mean_rewards)
    }

    pub fn context_probs(&self) -> &[f64] {
        &self.context_probs
    }

    pub fn mean_rewards(&self) -> &[Vec<f64>] {
        &self.mean_rewards
    }

    pub fn context_count(&self) -> usize {
        self.context_probs.len()
    }

    pub fn action_count(&self) -> usize {
        self.mean_rewards[0].len()
    }
}

/// `V(pi) = sum_x P(x) sum_a pi(a|x) E[Y | x, a]`, computed exactly.
pub fn true_policy_value(dgp: &DiscreteDgp, policy: &PolicyTable) -> Result<f64> {
    if policy.context_count() < dgp.context_count() || policy.action_count() != dgp.action_count()
    {
        return Err(Error::UnknownActionSet(format!(
            "policy is {}x{}, DGP needs at least {}x{}",
            policy.context_count(),
            policy.action_count(),
            dgp.context_count(),
            dgp.action_count()
        )));
    }
    let mut value = 0.0;
    for (x, &px) in dgp.context_probs.iter().enumerate() {
        let mut inner = 0.0;
        for (a, &mean) in dgp.mean_rewards[x].iter().enumerate() {
            inner += policy.prob(x, a)? * mean;
        }
        value += px * inner;
    }
    Ok(value)
}

/// `V(pi) - V(pi_alt)`.
pub fn true_ate(dgp: &DiscreteDgp, policy: &PolicyTable, policy_alt: &PolicyTable) -> Result<f64> {
    Ok(true_policy_value(dgp, policy)? - true_policy_value(dgp, policy_alt)?)
}
