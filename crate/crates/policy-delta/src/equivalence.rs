//! The bridge between the two experimentation modes.
//!
//! A two-arm experiment is an off-policy problem in disguise: treat the arm
//! assignment itself as the "action", logged by a Bernoulli policy that picks
//! treatment with probability `p`. The target policies are the two point-mass
//! policies (always-treatment, always-control), so the importance weight of a
//! record is `1/p` on the treatment arm and `-1/(1-p)` on the control arm.
//!
//! Under that mapping:
//!
//! * Delta-beta-IPS with the variance-minimising baseline `beta*` reproduces
//!   the difference-in-means point estimate, and (dividing by `N - 2` for the
//!   estimated baseline) its variance estimate as well;
//! * Delta-DR with an action-agnostic model centred at `beta*` reproduces
//!   regression-adjusted DiM the same way.
//!
//! [`verify_dim_equivalence`] and [`verify_radim_dr_equivalence`] compute
//! both sides on real data and report the observed discrepancies.
//!
//! Two propensity conventions are offered: `Nominal` uses the designed
//! allocation probability, `Empirical` the realised arm fractions. The
//! finite-sample identities are exact only in `Empirical` mode; `Nominal`
//! mode is what Monte Carlo unbiasedness studies want.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Framing, LoggedRecord};
use crate::error::{Error, Result};
use crate::estimate::EstimateResult;
use crate::model::RewardModel;
use crate::offpolicy::{delta_beta_ips_estimate, delta_dr_estimate, estimate_beta_star};
use crate::onpolicy::{dim_estimate, radim_estimate, sample_mean};
use crate::policy::PolicyTable;

/// Confidence level used inside the verification routines; the identities do
/// not depend on it.
const VERIFY_CI_LEVEL: f64 = 0.95;

/// Point-estimate and variance agreement below this is an exact match.
pub const EXACT_MATCH_TOLERANCE: f64 = 1e-10;
/// Agreement below this (but above exact) is an approximate match.
pub const APPROX_MATCH_TOLERANCE: f64 = 1e-2;

/// Which arm a record belongs to, under the treatment-as-action mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Treatment,
    Control,
}

/// How logging propensities are filled in when re-framing an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropensityMode {
    /// The designed allocation probability `p`.
    Nominal,
    /// The realised arm fractions `n_T / N` and `n_C / N`.
    Empirical,
}

/// A two-arm experiment: an AB-framed dataset plus its designed treatment
/// allocation probability. The first arm label of the dataset is the
/// treatment arm.
#[derive(Debug, Clone, PartialEq)]
pub struct ABExperiment {
    d: Dataset,
    nominal_p: f64,
}

impl ABExperiment {
    pub fn new(d: Dataset, nominal_p: f64) -> Result<Self> {
        d.require_framing(Framing::Ab)?;
        if !(nominal_p > 0.0 && nominal_p < 1.0) {
            return Err(Error::InvalidAllocation(nominal_p));
        }
        // Both arms must be present; split checks that.
        d.split_by_arm()?;
        Ok(ABExperiment { d, nominal_p })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.d
    }

    pub fn nominal_p(&self) -> f64 {
        self.nominal_p
    }

    pub fn treatment_label(&self) -> &str {
        &self.d.arm_labels()[0]
    }

    /// `(treatment, control)` datasets.
    pub fn split(&self) -> Result<(Dataset, Dataset)> {
        self.d.split_by_arm()
    }

    /// Realised treatment fraction `n_T / N`.
    pub fn empirical_p(&self) -> Result<f64> {
        let treated = self
            .d
            .records()
            .iter()
            .filter(|r| r.arm.as_deref() == Some(self.treatment_label()))
            .count();
        let p_hat = treated as f64 / self.d.len() as f64;
        if p_hat == 0.0 || p_hat == 1.0 {
            return Err(Error::InvalidAllocation(p_hat));
        }
        Ok(p_hat)
    }

    /// The allocation probability the given mode works with.
    pub fn allocation(&self, mode: PropensityMode) -> Result<f64> {
        match mode {
            PropensityMode::Nominal => Ok(self.nominal_p),
            PropensityMode::Empirical => self.empirical_p(),
        }
    }
}

/// The importance weight of an arm under the treatment-as-action mapping:
/// `1/p` for treatment, `-1/(1-p)` for control.
pub fn ab_weight(arm: Arm, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidAllocation(p));
    }
    Ok(match arm {
        Arm::Treatment => 1.0 / p,
        Arm::Control => -1.0 / (1.0 - p),
    })
}

/// Re-frames a two-arm experiment as an OPE dataset over the action set
/// `{0 = treatment, 1 = control}`, with logging propensities filled in
/// according to `mode`. Record order is preserved.
pub fn ab_to_ope(exp: &ABExperiment, mode: PropensityMode) -> Result<Dataset> {
    let treatment = exp.treatment_label().to_string();
    let n = exp.d.len();
    let treated_count = exp
        .d
        .records()
        .iter()
        .filter(|r| r.arm.as_deref() == Some(treatment.as_str()))
        .count();
    // Each arm's fraction is computed directly, not as one minus the other,
    // so the recorded propensities are correctly rounded rationals.
    let (t_prop, c_prop) = match mode {
        PropensityMode::Nominal => (exp.nominal_p, 1.0 - exp.nominal_p),
        PropensityMode::Empirical => {
            if treated_count == 0 || treated_count == n {
                return Err(Error::InvalidAllocation(treated_count as f64 / n as f64));
            }
            (
                treated_count as f64 / n as f64,
                (n - treated_count) as f64 / n as f64,
            )
        }
    };
    let records = exp
        .d
        .records()
        .iter()
        .map(|rec| {
            let treated = rec.arm.as_deref() == Some(treatment.as_str());
            LoggedRecord {
                context_id: rec.context_id,
                covariates: rec.covariates.clone(),
                action: if treated { 0 } else { 1 },
                reward: rec.reward,
                propensity: if treated { t_prop } else { c_prop },
                arm: rec.arm.clone(),
            }
        })
        .collect();
    Dataset::ope(records, 2)
}

/// The two point-mass target policies (always-treatment, always-control) for
/// a re-framed experiment.
pub fn target_policies(d_ope: &Dataset) -> Result<(PolicyTable, PolicyTable)> {
    d_ope.require_framing(Framing::Ope)?;
    let context_count = d_ope
        .records()
        .iter()
        .map(|r| r.context_id + 1)
        .max()
        .unwrap_or(1);
    Ok((
        PolicyTable::point_mass(context_count, 2, 0)?,
        PolicyTable::point_mass(context_count, 2, 1)?,
    ))
}

/// Closed form of the variance-minimising baseline in the two-arm framing:
/// `beta* = (1 - p) mu_T + p mu_C`. A weighted average, not the global mean,
/// unless `p = 1/2`.
pub fn beta_star_ab(mu_t: f64, mu_c: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidAllocation(p));
    }
    Ok((1.0 - p) * mu_t + p * mu_c)
}

/// Translates an action-agnostic model so that its sample mean over `d`
/// equals `target`.
pub fn center_reward_model(f: &RewardModel, d: &Dataset, target: f64) -> Result<RewardModel> {
    if !f.is_action_agnostic() {
        return Err(Error::ActionAwareModelRejected);
    }
    let values = d
        .records()
        .iter()
        .map(|rec| f.agnostic_value(rec))
        .collect::<Result<Vec<f64>>>()?;
    let mean = sample_mean(&values)?;
    f.shifted(target - mean)
}

/// Verdict of an equivalence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ExactMatch,
    ApproxMatch,
    Mismatch,
}

/// Paired on- and off-policy estimates with their observed discrepancies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub onpolicy: EstimateResult,
    pub offpolicy: EstimateResult,
    pub point_abs_diff: f64,
    pub variance_rel_diff: f64,
    /// On-policy variance over off-policy variance; the residual factor when
    /// the two disagree.
    pub variance_ratio: f64,
    pub propensity_mode: PropensityMode,
    pub dof_loss_used: u32,
    pub verdict: Verdict,
}

fn relative_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn build_report(
    onpolicy: EstimateResult,
    offpolicy: EstimateResult,
    mode: PropensityMode,
    dof_loss: u32,
) -> EquivalenceReport {
    let point_abs_diff = (onpolicy.point - offpolicy.point).abs();
    let variance_rel_diff = relative_diff(onpolicy.variance_of_mean, offpolicy.variance_of_mean);
    let variance_ratio = if offpolicy.variance_of_mean == 0.0 {
        if onpolicy.variance_of_mean == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        onpolicy.variance_of_mean / offpolicy.variance_of_mean
    };
    let verdict = if point_abs_diff < EXACT_MATCH_TOLERANCE
        && variance_rel_diff < EXACT_MATCH_TOLERANCE
    {
        Verdict::ExactMatch
    } else if point_abs_diff < APPROX_MATCH_TOLERANCE
        && variance_rel_diff < APPROX_MATCH_TOLERANCE
    {
        Verdict::ApproxMatch
    } else {
        Verdict::Mismatch
    };
    EquivalenceReport {
        onpolicy,
        offpolicy,
        point_abs_diff,
        variance_rel_diff,
        variance_ratio,
        propensity_mode: mode,
        dof_loss_used: dof_loss,
        verdict,
    }
}

/// Checks difference-in-means against Delta-beta*-IPS on the re-framed
/// experiment. In `Empirical` mode the points coincide for any baseline; the
/// variances coincide at `dof_loss = 2` when the arms are balanced.
pub fn verify_dim_equivalence(
    exp: &ABExperiment,
    mode: PropensityMode,
    dof_loss: u32,
) -> Result<EquivalenceReport> {
    let (d_t, d_c) = exp.split()?;
    let onpolicy = dim_estimate(&d_t, &d_c, VERIFY_CI_LEVEL)?;

    let d_ope = ab_to_ope(exp, mode)?;
    let (pi, pi_alt) = target_policies(&d_ope)?;
    let beta = estimate_beta_star(&d_ope, &pi, &pi_alt)?;

    // Cross-check against the closed form with the mode's allocation.
    let p = exp.allocation(mode)?;
    let closed_form = beta_star_ab(
        sample_mean(&d_t.rewards())?,
        sample_mean(&d_c.rewards())?,
        p,
    )?;
    if mode == PropensityMode::Empirical {
        debug_assert!(
            (beta - closed_form).abs() <= 1e-12 * beta.abs().max(1.0),
            "sample beta* {beta} deviates from closed form {closed_form}"
        );
    }

    let offpolicy = delta_beta_ips_estimate(&d_ope, &pi, &pi_alt, beta, dof_loss, VERIFY_CI_LEVEL)?;
    Ok(build_report(onpolicy, offpolicy, mode, dof_loss))
}

/// Checks regression-adjusted DiM against Delta-DR with the model centred at
/// `beta*`. Point identity in `Empirical` mode at any allocation; variance
/// identity at balance with `dof_loss = 2`.
pub fn verify_radim_dr_equivalence(
    exp: &ABExperiment,
    f: &RewardModel,
    mode: PropensityMode,
    dof_loss: u32,
) -> Result<EquivalenceReport> {
    if !f.is_action_agnostic() {
        return Err(Error::ActionAwareModelRejected);
    }
    let (d_t, d_c) = exp.split()?;
    let onpolicy = radim_estimate(&d_t, &d_c, f, VERIFY_CI_LEVEL)?;

    let d_ope = ab_to_ope(exp, mode)?;
    let (pi, pi_alt) = target_policies(&d_ope)?;
    let beta = estimate_beta_star(&d_ope, &pi, &pi_alt)?;
    let centered = center_reward_model(f, &d_ope, beta)?;

    let offpolicy =
        delta_dr_estimate(&d_ope, &pi, &pi_alt, &centered, dof_loss, VERIFY_CI_LEVEL)?;
    Ok(build_report(onpolicy, offpolicy, mode, dof_loss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::test_support::ab_record;
    use approx::assert_abs_diff_eq;

    fn experiment(t_rewards: &[f64], c_rewards: &[f64], p: f64) -> ABExperiment {
        let mut records = Vec::new();
        let mut ctx = 0;
        for &r in t_rewards {
            records.push(ab_record(ctx, r, p, "treatment"));
            ctx += 1;
        }
        for &r in c_rewards {
            records.push(ab_record(ctx, r, 1.0 - p, "control"));
            ctx += 1;
        }
        let d =
            Dataset::ab_with_arms(records, ("treatment".into(), "control".into())).unwrap();
        ABExperiment::new(d, p).unwrap()
    }

    #[test]
    fn ab_weight_examples() {
        assert_eq!(ab_weight(Arm::Treatment, 0.5).unwrap(), 2.0);
        assert_eq!(ab_weight(Arm::Control, 0.5).unwrap(), -2.0);
        assert_abs_diff_eq!(
            ab_weight(Arm::Control, 0.25).unwrap(),
            -4.0 / 3.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            ab_weight(Arm::Treatment, 0.0),
            Err(Error::InvalidAllocation(_))
        ));
        assert!(matches!(
            ab_weight(Arm::Treatment, 1.0),
            Err(Error::InvalidAllocation(_))
        ));
    }

    #[test]
    fn ab_to_ope_nominal_mode() {
        let exp = experiment(&[1.0], &[2.0], 0.5);
        let d = ab_to_ope(&exp, PropensityMode::Nominal).unwrap();
        assert_eq!(d.framing(), Framing::Ope);
        assert_eq!(d.action_count(), Some(2));
        let props: Vec<f64> = d.records().iter().map(|r| r.propensity).collect();
        let actions: Vec<usize> = d.records().iter().map(|r| r.action).collect();
        assert_eq!(props, vec![0.5, 0.5]);
        assert_eq!(actions, vec![0, 1]);
    }

    #[test]
    fn ab_to_ope_empirical_mode_uses_realised_fractions() {
        let exp = experiment(&[1.0, 2.0], &[3.0], 0.5);
        let d = ab_to_ope(&exp, PropensityMode::Empirical).unwrap();
        let props: Vec<f64> = d.records().iter().map(|r| r.propensity).collect();
        assert_eq!(props, vec![2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn ab_to_ope_nominal_ignores_realised_fractions() {
        let exp = experiment(&[1.0, 2.0], &[3.0], 0.5);
        let d = ab_to_ope(&exp, PropensityMode::Nominal).unwrap();
        let props: Vec<f64> = d.records().iter().map(|r| r.propensity).collect();
        assert_eq!(props, vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn beta_star_ab_examples() {
        assert_eq!(beta_star_ab(3.0, 1.0, 0.5).unwrap(), 2.0);
        assert_eq!(beta_star_ab(3.0, 1.0, 0.25).unwrap(), 2.5);
        assert_eq!(beta_star_ab(7.0, 7.0, 0.3).unwrap(), 7.0);
    }

    #[test]
    fn centering_examples() {
        let exp = experiment(&[1.0, 2.0], &[3.0, 4.0], 0.5);
        let d = exp.dataset();

        let f0 = center_reward_model(&RewardModel::constant(0.0), d, 2.0).unwrap();
        assert_eq!(f0, RewardModel::constant(2.0));

        let f = RewardModel::ByContext { values: vec![1.0, 3.0, 5.0, 11.0] };
        let same = center_reward_model(&f, d, 5.0).unwrap();
        assert_eq!(same, f);

        let exp2 = experiment(&[1.0], &[3.0], 0.5);
        let g = RewardModel::ByContext { values: vec![1.0, 3.0] };
        let centered = center_reward_model(&g, exp2.dataset(), 0.0).unwrap();
        assert_eq!(centered, RewardModel::ByContext { values: vec![-1.0, 1.0] });
    }

    #[test]
    fn dim_equivalence_point_is_exact_in_empirical_mode() {
        let exp = experiment(&[2.0, 4.0, 1.0], &[1.0, 0.0], 0.4);
        let report = verify_dim_equivalence(&exp, PropensityMode::Empirical, 2).unwrap();
        assert!(report.point_abs_diff < 1e-12);
    }

    #[test]
    fn dim_equivalence_exact_at_balance() {
        let exp = experiment(&[2.0, 4.0, 1.5], &[1.0, 0.0, 2.5], 0.5);
        let report = verify_dim_equivalence(&exp, PropensityMode::Empirical, 2).unwrap();
        assert_eq!(report.verdict, Verdict::ExactMatch);
        assert!(report.variance_rel_diff < 1e-12);
    }

    #[test]
    fn dim_equivalence_dof_one_shows_bessel_factor() {
        let exp = experiment(&[2.0, 4.0, 1.5], &[1.0, 0.0, 2.5], 0.5);
        let report = verify_dim_equivalence(&exp, PropensityMode::Empirical, 1).unwrap();
        let n = exp.dataset().len();
        let expected = crate::offpolicy::bessel_factor(n).unwrap();
        assert_abs_diff_eq!(report.variance_ratio, expected, epsilon = 1e-12);
    }

    #[test]
    fn radim_equivalence_with_zero_model_reduces_to_dim() {
        let exp = experiment(&[2.0, 4.0], &[1.0, 0.0], 0.5);
        let dim = verify_dim_equivalence(&exp, PropensityMode::Empirical, 2).unwrap();
        let radim = verify_radim_dr_equivalence(
            &exp,
            &RewardModel::constant(0.0),
            PropensityMode::Empirical,
            2,
        )
        .unwrap();
        assert_abs_diff_eq!(radim.onpolicy.point, dim.onpolicy.point, epsilon = 1e-15);
        assert_abs_diff_eq!(radim.offpolicy.point, dim.offpolicy.point, epsilon = 1e-12);
        assert_abs_diff_eq!(
            radim.offpolicy.variance_of_mean,
            dim.offpolicy.variance_of_mean,
            epsilon = 1e-12
        );
    }

    #[test]
    fn radim_equivalence_point_exact_any_allocation() {
        let exp = experiment(&[2.0, 4.0, 1.5, 0.5], &[1.0, 0.0], 0.7);
        let f = RewardModel::ByContext {
            values: vec![0.5, -1.0, 2.0, 0.0, 1.0, 3.0],
        };
        let report =
            verify_radim_dr_equivalence(&exp, &f, PropensityMode::Empirical, 2).unwrap();
        assert!(report.point_abs_diff < 1e-12);
    }

    #[test]
    fn radim_equivalence_variance_exact_at_balance() {
        let exp = experiment(&[2.0, 4.0, 1.5], &[1.0, 0.0, 2.5], 0.5);
        let f = RewardModel::ByContext {
            values: vec![0.5, -1.0, 2.0, 0.0, 1.0, 3.0],
        };
        let report =
            verify_radim_dr_equivalence(&exp, &f, PropensityMode::Empirical, 2).unwrap();
        assert_eq!(report.verdict, Verdict::ExactMatch);
        assert!(report.variance_rel_diff < 1e-10);
    }

    #[test]
    fn radim_equivalence_rejects_action_aware_models() {
        let exp = experiment(&[1.0, 2.0], &[0.0, 1.0], 0.5);
        let f = RewardModel::ActionTable { values: vec![vec![0.0, 0.0]] };
        assert!(matches!(
            verify_radim_dr_equivalence(&exp, &f, PropensityMode::Empirical, 2),
            Err(Error::ActionAwareModelRejected)
        ));
    }

    #[test]
    fn experiment_requires_both_arms() {
        let d = Dataset::ab(vec![
            ab_record(0, 1.0, 0.5, "treatment"),
            ab_record(1, 2.0, 0.5, "treatment"),
        ])
        .unwrap();
        assert!(ABExperiment::new(d, 0.5).is_err());
    }
}
