//! On-policy (A/B-test) estimators: difference in means, regression-adjusted
//! difference in means, and the variance-reduction law that governs them.
//!
//! With `mu(Y, pi)` the sample mean of an arm and `s^2(Y, pi)` its sample
//! variance, the difference-in-means point estimate is
//! `mu(Y, pi) - mu(Y, pi')` with variance of the mean
//! `s^2(Y, pi)/n + s^2(Y, pi')/n'`. Regression adjustment applies the same
//! machinery to residuals `y - f(x)` and shrinks the variance by the factor
//! `1 - rho^2(Y, f(X))` when `f` is scaled well.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::EstimateResult;
use crate::model::RewardModel;

/// Outcome values for one arm, raw or covariate-adjusted.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedSample {
    pub values: Vec<f64>,
    pub label: SampleLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleLabel {
    Raw,
    Adjusted,
}

impl AdjustedSample {
    /// Raw rewards of a dataset, in record order.
    pub fn raw(d: &Dataset) -> Self {
        AdjustedSample {
            values: d.rewards(),
            label: SampleLabel::Raw,
        }
    }

    /// Residuals `y - f(x)` of a dataset, in record order.
    pub fn adjusted(d: &Dataset, f: &RewardModel) -> Result<Self> {
        let values = d
            .records()
            .iter()
            .map(|rec| Ok(rec.reward - f.agnostic_value(rec)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(AdjustedSample {
            values,
            label: SampleLabel::Adjusted,
        })
    }
}

/// Arithmetic mean.
pub fn sample_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Sample variance `sum (v - mean)^2 / (n - dof_loss)`.
///
/// `dof_loss = 1` is Bessel's correction for a mean estimated from the same
/// sample; `dof_loss = 2` accounts for one further estimated statistic.
pub fn sample_variance(values: &[f64], dof_loss: u32) -> Result<f64> {
    let n = values.len();
    if n <= dof_loss as usize {
        return Err(Error::InsufficientData {
            needed: dof_loss as usize,
            got: n,
        });
    }
    let mean = sample_mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(ss / (n - dof_loss as usize) as f64)
}

fn two_arm_estimate(
    treatment: &[f64],
    control: &[f64],
    ci_level: f64,
) -> Result<EstimateResult> {
    for arm in [treatment, control] {
        if arm.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 1,
                got: arm.len(),
            });
        }
    }
    let point = sample_mean(treatment)? - sample_mean(control)?;
    let variance_of_mean = sample_variance(treatment, 1)? / treatment.len() as f64
        + sample_variance(control, 1)? / control.len() as f64;
    EstimateResult::from_moments(
        point,
        variance_of_mean,
        2,
        treatment.len() + control.len(),
        ci_level,
    )
}

/// Difference-in-means ATE estimate from two independent arms.
pub fn dim_estimate(d_t: &Dataset, d_c: &Dataset, ci_level: f64) -> Result<EstimateResult> {
    two_arm_estimate(&d_t.rewards(), &d_c.rewards(), ci_level)
}

/// Regression-adjusted difference in means: the DiM estimator applied to
/// residuals `y - f(x)`. Requires an action-agnostic model; `f` is used as
/// given, with no implicit rescaling.
pub fn radim_estimate(
    d_t: &Dataset,
    d_c: &Dataset,
    f: &RewardModel,
    ci_level: f64,
) -> Result<EstimateResult> {
    if !f.is_action_agnostic() {
        return Err(Error::ActionAwareModelRejected);
    }
    let t = AdjustedSample::adjusted(d_t, f)?;
    let c = AdjustedSample::adjusted(d_c, f)?;
    two_arm_estimate(&t.values, &c.values, ci_level)
}

fn centered_moments(y: &[f64], fx: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if y.len() != fx.len() {
        return Err(Error::ModelShape(format!(
            "outcome and predictor lengths differ: {} vs {}",
            y.len(),
            fx.len()
        )));
    }
    if y.len() < 2 {
        return Err(Error::InsufficientData { needed: 1, got: y.len() });
    }
    let my = sample_mean(y)?;
    let mf = sample_mean(fx)?;
    let dy = y.iter().map(|v| v - my).collect();
    let df = fx.iter().map(|v| v - mf).collect();
    Ok((dy, df))
}

/// Least-squares scaling coefficient `theta = Cov(Y, f(X)) / Var(f(X))`.
///
/// Scaling `f` by `theta` minimises `Var(Y - theta f(X))`; callers compose
/// the scaled model themselves.
pub fn fit_scaling_coefficient(y: &[f64], fx: &[f64]) -> Result<f64> {
    let (dy, df) = centered_moments(y, fx)?;
    let var_f: f64 = df.iter().map(|v| v * v).sum();
    if var_f == 0.0 {
        return Err(Error::ZeroVariancePredictor);
    }
    let cov: f64 = dy.iter().zip(&df).map(|(a, b)| a * b).sum();
    Ok(cov / var_f)
}

/// `Var(Y - theta f(X)) / Var(Y)` at the least-squares `theta`; equals
/// `1 - rho^2(Y, f(X))`.
pub fn residual_variance_ratio(y: &[f64], fx: &[f64]) -> Result<f64> {
    let (dy, df) = centered_moments(y, fx)?;
    let var_y: f64 = dy.iter().map(|v| v * v).sum();
    if var_y == 0.0 {
        return Err(Error::ZeroVarianceOutcome);
    }
    let theta = fit_scaling_coefficient(y, fx)?;
    let var_resid: f64 = dy
        .iter()
        .zip(&df)
        .map(|(a, b)| {
            let r = a - theta * b;
            r * r
        })
        .sum();
    Ok(var_resid / var_y)
}
