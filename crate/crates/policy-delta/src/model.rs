//! Outcome (reward) models used for regression adjustment.
//!
//! Models are plain data, never code: they load from JSON files and evaluate
//! against a record's covariates or context ID. Action-agnostic kinds depend
//! on the context only; the action-aware kind is a per-(context, action)
//! table.

use serde::{Deserialize, Serialize};

use crate::data::LoggedRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardModel {
    /// `f(x) = value` for every context.
    Constant { value: f64 },
    /// `f(x) = intercept + coefficients . covariates`.
    Linear { intercept: f64, coefficients: Vec<f64> },
    /// `f(x)` looked up by `context_id`. Files produced by `simulate` index
    /// units as `0..n`, so per-record prediction files map onto this kind.
    #[serde(alias = "per_record")]
    ByContext { values: Vec<f64> },
    /// Action-aware `f(x, a)` looked up by `(context_id, action)`.
    ActionTable { values: Vec<Vec<f64>> },
}

impl RewardModel {
    pub fn constant(value: f64) -> Self {
        RewardModel::Constant { value }
    }

    pub fn is_action_agnostic(&self) -> bool {
        !matches!(self, RewardModel::ActionTable { .. })
    }

    /// `f(x, a)` for a record; action-agnostic kinds ignore `action`.
    pub fn value(&self, rec: &LoggedRecord, action: usize) -> Result<f64> {
        match self {
            RewardModel::Constant { value } => Ok(*value),
            RewardModel::Linear {
                intercept,
                coefficients,
            } => {
                if coefficients.len() != rec.covariates.len() {
                    return Err(Error::ModelShape(format!(
                        "linear model has {} coefficients, record has {} covariates",
                        coefficients.len(),
                        rec.covariates.len()
                    )));
                }
                let dot: f64 = coefficients
                    .iter()
                    .zip(&rec.covariates)
                    .map(|(c, v)| c * v)
                    .sum();
                Ok(intercept + dot)
            }
            RewardModel::ByContext { values } => {
                values.get(rec.context_id).copied().ok_or_else(|| {
                    Error::ModelShape(format!(
                        "model covers {} contexts; record has context_id {}",
                        values.len(),
                        rec.context_id
                    ))
                })
            }
            RewardModel::ActionTable { values } => {
                let row = values.get(rec.context_id).ok_or_else(|| {
                    Error::ModelShape(format!(
                        "model covers {} contexts; record has context_id {}",
                        values.len(),
                        rec.context_id
                    ))
                })?;
                row.get(action).copied().ok_or_else(|| {
                    Error::UnknownActionSet(format!(
                        "model row {} covers {} actions; asked for action {action}",
                        rec.context_id,
                        row.len()
                    ))
                })
            }
        }
    }

    /// `f(x)` for an action-agnostic model; rejects action-aware models.
    pub fn agnostic_value(&self, rec: &LoggedRecord) -> Result<f64> {
        if !self.is_action_agnostic() {
            return Err(Error::ActionAwareModelRejected);
        }
        self.value(rec, 0)
    }

    /// The model translated by `delta`: `f'(x) = f(x) + delta`. Only defined
    /// for action-agnostic models.
    pub fn shifted(&self, delta: f64) -> Result<RewardModel> {
        match self {
            RewardModel::Constant { value } => Ok(RewardModel::Constant { value: value + delta }),
            RewardModel::Linear {
                intercept,
                coefficients,
            } => Ok(RewardModel::Linear {
                intercept: intercept + delta,
                coefficients: coefficients.clone(),
            }),
            RewardModel::ByContext { values } => Ok(RewardModel::ByContext {
                values: values.iter().map(|v| v + delta).collect(),
            }),
            RewardModel::ActionTable { .. } => Err(Error::ActionAwareModelRejected),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(context_id: usize, covariates: Vec<f64>) -> LoggedRecord {
        LoggedRecord {
            context_id,
            covariates,
            action: 0,
            reward: 0.0,
            propensity: 0.5,
            arm: None,
        }
    }

    #[test]
    fn linear_evaluates_dot_product() {
        let m = RewardModel::Linear {
            intercept: 1.0,
            coefficients: vec![2.0, -1.0],
        };
        assert_eq!(m.agnostic_value(&rec(0, vec![3.0, 4.0])).unwrap(), 3.0);
    }

    #[test]
    fn linear_rejects_dimension_mismatch() {
        let m = RewardModel::Linear {
            intercept: 0.0,
            coefficients: vec![1.0],
        };
        assert!(matches!(
            m.agnostic_value(&rec(0, vec![1.0, 2.0])),
            Err(Error::ModelShape(_))
        ));
    }

    #[test]
    fn by_context_lookup_and_bounds() {
        let m = RewardModel::ByContext {
            values: vec![1.0, 2.0],
        };
        assert_eq!(m.agnostic_value(&rec(1, vec![])).unwrap(), 2.0);
        assert!(m.agnostic_value(&rec(2, vec![])).is_err());
    }

    #[test]
    fn action_table_is_action_aware() {
        let m = RewardModel::ActionTable {
            values: vec![vec![1.0, 2.0]],
        };
        assert!(!m.is_action_agnostic());
        assert_eq!(m.value(&rec(0, vec![]), 1).unwrap(), 2.0);
        assert!(matches!(
            m.agnostic_value(&rec(0, vec![])),
            Err(Error::ActionAwareModelRejected)
        ));
        assert!(matches!(m.shifted(1.0), Err(Error::ActionAwareModelRejected)));
    }

    #[test]
    fn shift_translates_all_agnostic_kinds() {
        let rec0 = rec(0, vec![1.0]);
        for m in [
            RewardModel::constant(2.0),
            RewardModel::Linear {
                intercept: 2.0,
                coefficients: vec![0.0],
            },
            RewardModel::ByContext { values: vec![2.0] },
        ] {
            let shifted = m.shifted(0.5).unwrap();
            assert_eq!(shifted.agnostic_value(&rec0).unwrap(), 2.5);
        }
    }

    #[test]
    fn per_record_alias_parses_as_by_context() {
        let m: RewardModel =
            serde_json::from_str(r#"{"kind": "per_record", "values": [1.0, 2.0]}"#).unwrap();
        assert_eq!(m, RewardModel::ByContext { values: vec![1.0, 2.0] });
    }
}
