//! Logged-experiment data model: records, framings, and validated datasets.
//!
//! A [`Dataset`] is either *AB-framed* (every record carries the label of the
//! deployed arm, actions index the two arms) or *OPE-framed* (actions are
//! content-level IDs drawn from a finite action set, no arm labels required).
//! Datasets are immutable after validation and safe to share across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a dataset's `action` field is to be interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Framing {
    /// Two-arm experiment; `arm` identifies the deployed policy and
    /// `action` equals the arm index.
    Ab,
    /// Logged bandit feedback; `action` is a content-level action ID.
    Ope,
}

/// One logged interaction.
///
/// `propensity` is the logging policy's probability of the action that was
/// actually taken, `pi_0(a | x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedRecord {
    pub context_id: usize,
    #[serde(default)]
    pub covariates: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub propensity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm: Option<String>,
}

/// A validated collection of logged records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<LoggedRecord>,
    framing: Framing,
    action_count: Option<usize>,
    arm_labels: Vec<String>,
}

impl Dataset {
    /// Validates `records` as an AB-framed dataset, inferring the arm labels
    /// in order of first appearance.
    pub fn ab(records: Vec<LoggedRecord>) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        for (index, rec) in records.iter().enumerate() {
            let arm = rec
                .arm
                .as_ref()
                .ok_or(Error::UnknownArmLabel { index, arm: None })?;
            if !labels.iter().any(|l| l == arm) {
                labels.push(arm.clone());
            }
        }
        Self::ab_with_arms_inner(records, labels)
    }

    /// Validates `records` as an AB-framed dataset with an explicit arm
    /// order: `arms.0` is the treatment-side label used by
    /// [`split_by_arm`](Self::split_by_arm) and downstream sign conventions.
    pub fn ab_with_arms(records: Vec<LoggedRecord>, arms: (String, String)) -> Result<Self> {
        Self::ab_with_arms_inner(records, vec![arms.0, arms.1])
    }

    fn ab_with_arms_inner(records: Vec<LoggedRecord>, labels: Vec<String>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if labels.len() > 2 {
            return Err(Error::UnknownArmLabel {
                index: 0,
                arm: Some(labels[2].clone()),
            });
        }
        for (index, rec) in records.iter().enumerate() {
            validate_common(index, rec)?;
            match rec.arm.as_ref() {
                Some(arm) if labels.iter().any(|l| l == arm) => {}
                other => {
                    return Err(Error::UnknownArmLabel {
                        index,
                        arm: other.cloned(),
                    })
                }
            }
        }
        Ok(Dataset {
            records,
            framing: Framing::Ab,
            action_count: None,
            arm_labels: labels,
        })
    }

    /// Validates `records` as an OPE-framed dataset over `action_count`
    /// actions.
    pub fn ope(records: Vec<LoggedRecord>, action_count: usize) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if action_count == 0 {
            return Err(Error::InvalidConfig("action_count must be positive".into()));
        }
        for (index, rec) in records.iter().enumerate() {
            validate_common(index, rec)?;
            if rec.action >= action_count {
                return Err(Error::ActionOutOfRange {
                    index,
                    action: rec.action,
                    action_count,
                });
            }
        }
        Ok(Dataset {
            records,
            framing: Framing::Ope,
            action_count: Some(action_count),
            arm_labels: Vec::new(),
        })
    }

    pub fn records(&self) -> &[LoggedRecord] {
        &self.records
    }

    pub fn framing(&self) -> Framing {
        self.framing
    }

    /// Action set size; present only for OPE-framed data.
    pub fn action_count(&self) -> Option<usize> {
        self.action_count
    }

    /// Arm labels in treatment-first order; empty for OPE-framed data.
    pub fn arm_labels(&self) -> &[String] {
        &self.arm_labels
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Rewards in record order.
    pub fn rewards(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.reward).collect()
    }

    /// Requires `framing` to match, with a descriptive error otherwise.
    pub fn require_framing(&self, expected: Framing) -> Result<()> {
        if self.framing == expected {
            Ok(())
        } else {
            Err(Error::WrongFraming {
                expected,
                found: self.framing,
            })
        }
    }

    /// Partitions an AB-framed dataset into its two arms, preserving record
    /// order within each arm. The first returned dataset holds the records of
    /// the first arm label.
    pub fn split_by_arm(&self) -> Result<(Dataset, Dataset)> {
        self.require_framing(Framing::Ab)?;
        let first = self
            .arm_labels
            .first()
            .cloned()
            .ok_or(Error::EmptyDataset)?;
        let second = self.arm_labels.get(1).cloned();

        let mut a = Vec::new();
        let mut b = Vec::new();
        for rec in &self.records {
            if rec.arm.as_deref() == Some(first.as_str()) {
                a.push(rec.clone());
            } else {
                b.push(rec.clone());
            }
        }
        if a.is_empty() {
            return Err(Error::EmptyArm { arm: first });
        }
        if b.is_empty() {
            return Err(Error::EmptyArm {
                arm: second.unwrap_or_else(|| "(absent)".to_string()),
            });
        }
        let sub = |records: Vec<LoggedRecord>| Dataset {
            records,
            framing: Framing::Ab,
            action_count: None,
            arm_labels: self.arm_labels.clone(),
        };
        Ok((sub(a), sub(b)))
    }
}

fn validate_common(index: usize, rec: &LoggedRecord) -> Result<()> {
    if !(rec.propensity > 0.0 && rec.propensity <= 1.0) {
        return Err(Error::NonFinitePropensity {
            index,
            value: rec.propensity,
        });
    }
    if !rec.reward.is_finite() {
        return Err(Error::NonFiniteReward {
            index,
            value: rec.reward,
        });
    }
    if rec.covariates.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse(format!(
            "record {index}: covariates contain a non-finite value"
        )));
    }
    Ok(())
}

/// Validates raw records under the given framing.
///
/// In OPE framing the action count is inferred as `max(action) + 1`; use
/// [`Dataset::ope`] to pin it explicitly.
pub fn validate_dataset(records: Vec<LoggedRecord>, framing: Framing) -> Result<Dataset> {
    match framing {
        Framing::Ab => Dataset::ab(records),
        Framing::Ope => {
            let action_count = records
                .iter()
                .map(|r| r.action + 1)
                .max()
                .ok_or(Error::EmptyDataset)?;
            Dataset::ope(records, action_count)
        }
    }
}
