//! Discrete conditional policies over finite context and action sets.

use crate::error::{Error, Result};

/// Tolerance for the row-stochastic check at construction.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// A policy `pi(a | x)` as a dense row-stochastic matrix over
/// `context_count` contexts and `action_count` actions.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    probs: Vec<f64>,
    context_count: usize,
    action_count: usize,
}

impl PolicyTable {
    /// Builds a table from per-context probability rows. Every entry must be
    /// non-negative and every row must sum to 1 within [`ROW_SUM_TOLERANCE`].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidConfig("policy table has no rows".into()));
        }
        let action_count = rows[0].len();
        if action_count == 0 {
            return Err(Error::InvalidConfig("policy table has no actions".into()));
        }
        let mut probs = Vec::with_capacity(rows.len() * action_count);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != action_count {
                return Err(Error::InvalidConfig(format!(
                    "policy row {i} has {} entries, expected {action_count}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &p in row {
                if !(p >= 0.0) || !p.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "policy row {i} contains an invalid probability {p}"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidConfig(format!(
                    "policy row {i} sums to {sum}, expected 1"
                )));
            }
            probs.extend_from_slice(row);
        }
        Ok(PolicyTable {
            probs,
            context_count: rows.len(),
            action_count,
        })
    }

    /// Deterministic policy putting all mass on `action` in every context.
    pub fn point_mass(context_count: usize, action_count: usize, action: usize) -> Result<Self> {
        if context_count == 0 || action_count == 0 || action >= action_count {
            return Err(Error::InvalidConfig(format!(
                "point-mass policy needs action {action} < action_count {action_count} and \
                 a positive context count"
            )));
        }
        let mut probs = vec![0.0; context_count * action_count];
        for x in 0..context_count {
            probs[x * action_count + action] = 1.0;
        }
        Ok(PolicyTable {
            probs,
            context_count,
            action_count,
        })
    }

    /// Uniform policy over the action set in every context.
    pub fn uniform(context_count: usize, action_count: usize) -> Result<Self> {
        let row = vec![1.0 / action_count as f64; action_count];
        Self::from_rows(vec![row; context_count])
    }

    pub fn context_count(&self) -> usize {
        self.context_count
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    /// `pi(action | context_id)`, or an error if the table does not cover
    /// the pair.
    pub fn prob(&self, context_id: usize, action: usize) -> Result<f64> {
        if context_id >= self.context_count || action >= self.action_count {
            return Err(Error::UnknownActionSet(format!(
                "policy covers {} contexts x {} actions; asked for ({context_id}, {action})",
                self.context_count, self.action_count
            )));
        }
        Ok(self.probs[context_id * self.action_count + action])
    }

    /// Row for one context.
    pub fn row(&self, context_id: usize) -> Result<&[f64]> {
        if context_id >= self.context_count {
            return Err(Error::UnknownActionSet(format!(
                "policy covers {} contexts; asked for context {context_id}",
                self.context_count
            )));
        }
        let start = context_id * self.action_count;
        Ok(&self.probs[start..start + self.action_count])
    }

    /// Convex mixture `alpha * self + (1 - alpha) * other`, used in tests of
    /// value linearity.
    pub fn mix(&self, other: &PolicyTable, alpha: f64) -> Result<PolicyTable> {
        if self.context_count != other.context_count || self.action_count != other.action_count {
            return Err(Error::InvalidConfig("mixing policies of different shapes".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidConfig(format!("mixture weight {alpha} outside [0, 1]")));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(&a, &b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        Ok(PolicyTable {
            probs,
            context_count: self.context_count,
            action_count: self.action_count,
        })
    }

    /// Rows as owned vectors (the file-format representation).
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.context_count)
            .map(|x| self.row(x).expect("in range").to_vec())
            .collect()
    }
}
