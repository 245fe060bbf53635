//! Synthetic data-generating processes with known ground truth.
//!
//! Two families: two-arm experiments with a tunable covariate-outcome
//! correlation (so the variance-reduction factor of regression adjustment is
//! known in closed form), and discrete contextual-bandit logs with exact
//! logging propensities. Generation is deterministic given the seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Framing, LoggedRecord};
use crate::equivalence::ABExperiment;
use crate::error::{Error, Result};
use crate::model::RewardModel;
use crate::oracle::DiscreteDgp;
use crate::policy::PolicyTable;

/// Largest per-context denominator tried when expressing logging
/// probabilities as exact rationals for exhaustive enumeration.
pub const MAX_EXHAUSTIVE_DENOMINATOR: usize = 10_000;

const TREATMENT_ARM: &str = "treatment";
const CONTROL_ARM: &str = "control";

/// Configuration for both generator families. The `framing` field selects
/// which of the optional sections applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    pub framing: Framing,

    /// Treatment allocation probability (AB framing).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// True treatment effect (AB framing).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ate: Option<f64>,
    /// Target correlation between outcome and the covariate model
    /// (AB framing), in `[0, 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,

    /// Number of contexts (OPE framing); defaults to the reward table's rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_count: Option<usize>,
    /// Number of actions (OPE framing); defaults to the reward table's width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_count: Option<usize>,
    /// Softmax sharpness of the logging policy over the reward table
    /// (OPE framing); higher is closer to uniform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logging_temperature: Option<f64>,
    /// Mean rewards `E[Y | x, a]` (OPE framing).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_table: Option<Vec<Vec<f64>>>,
    /// Explicit logging policy rows, overriding the softmax construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logging_policy: Option<Vec<Vec<f64>>>,
    /// Reward noise standard deviation (OPE framing).
    #[serde(default)]
    pub noise_sd: f64,
    /// Assign exactly `round(n p)` units to treatment via a seeded shuffle
    /// instead of independent Bernoulli draws (AB framing). With `p = 1/2`
    /// and even `n` this produces exactly balanced arms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_allocation: Option<bool>,
}

impl SyntheticConfig {
    /// A two-arm experiment config.
    pub fn ab(n: usize, seed: u64, p: f64, ate: f64, rho: f64) -> Self {
        SyntheticConfig {
            n,
            seed,
            framing: Framing::Ab,
            p: Some(p),
            ate: Some(ate),
            rho: Some(rho),
            context_count: None,
            action_count: None,
            logging_temperature: None,
            reward_table: None,
            logging_policy: None,
            noise_sd: 0.0,
            exact_allocation: None,
        }
    }

    /// A contextual-bandit log config with a softmax logging policy.
    pub fn bandit(
        n: usize,
        seed: u64,
        reward_table: Vec<Vec<f64>>,
        logging_temperature: f64,
        noise_sd: f64,
    ) -> Self {
        SyntheticConfig {
            n,
            seed,
            framing: Framing::Ope,
            p: None,
            ate: None,
            rho: None,
            context_count: None,
            action_count: None,
            logging_temperature: Some(logging_temperature),
            reward_table: Some(reward_table),
            logging_policy: None,
            noise_sd,
            exact_allocation: None,
        }
    }

    /// The same config with an explicit logging policy.
    pub fn with_logging_policy(mut self, rows: Vec<Vec<f64>>) -> Self {
        self.logging_policy = Some(rows);
        self
    }

    /// The same config with exact (shuffled) treatment allocation.
    pub fn with_exact_allocation(mut self) -> Self {
        self.exact_allocation = Some(true);
        self
    }

    /// The same config with `seed + index`; replication streams are
    /// independent under the ChaCha keying.
    pub fn replication(&self, index: u64) -> Self {
        let mut cfg = self.clone();
        cfg.seed = self.seed.wrapping_add(index);
        cfg
    }

    fn require(&self, framing: Framing) -> Result<()> {
        if self.framing != framing {
            return Err(Error::InvalidConfig(format!(
                "config framing {:?} does not match the requested generator",
                self.framing
            )));
        }
        Ok(())
    }

    fn ab_params(&self) -> Result<(f64, f64, f64)> {
        self.require(Framing::Ab)?;
        let p = self
            .p
            .ok_or_else(|| Error::InvalidConfig("key `p` required for ab framing".into()))?;
        let ate = self
            .ate
            .ok_or_else(|| Error::InvalidConfig("key `ate` required for ab framing".into()))?;
        let rho = self
            .rho
            .ok_or_else(|| Error::InvalidConfig("key `rho` required for ab framing".into()))?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidConfig(format!("key `p` = {p} outside (0, 1)")));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidConfig(format!("key `rho` = {rho} outside [0, 1)")));
        }
        if !ate.is_finite() {
            return Err(Error::InvalidConfig(format!("key `ate` = {ate} is not finite")));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig("key `n` must be at least 2".into()));
        }
        Ok((p, ate, rho))
    }

    fn ope_reward_table(&self) -> Result<&Vec<Vec<f64>>> {
        self.require(Framing::Ope)?;
        let table = self.reward_table.as_ref().ok_or_else(|| {
            Error::InvalidConfig("key `reward_table` required for ope framing".into())
        })?;
        if table.is_empty() || table[0].is_empty() {
            return Err(Error::InvalidConfig("key `reward_table` must be non-empty".into()));
        }
        let width = table[0].len();
        if table.iter().any(|row| row.len() != width) {
            return Err(Error::InvalidConfig("key `reward_table` must be rectangular".into()));
        }
        if table.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "key `reward_table` contains a non-finite entry".into(),
            ));
        }
        if let Some(c) = self.context_count {
            if c != table.len() {
                return Err(Error::InvalidConfig(format!(
                    "key `context_count` = {c} does not match reward_table rows {}",
                    table.len()
                )));
            }
        }
        if let Some(a) = self.action_count {
            if a != width {
                return Err(Error::InvalidConfig(format!(
                    "key `action_count` = {a} does not match reward_table width {width}"
                )));
            }
        }
        Ok(table)
    }

    /// Logging policy rows: the explicit override if present, otherwise a
    /// softmax of the reward table at the configured temperature.
    pub fn logging_rows(&self) -> Result<Vec<Vec<f64>>> {
        let table = self.ope_reward_table()?;
        if let Some(rows) = &self.logging_policy {
            if rows.len() != table.len() || rows.iter().any(|r| r.len() != table[0].len()) {
                return Err(Error::InvalidConfig(
                    "key `logging_policy` must match the reward_table shape".into(),
                ));
            }
            return Ok(rows.clone());
        }
        let temperature = self.logging_temperature.ok_or_else(|| {
            Error::InvalidConfig(
                "key `logging_temperature` required when no logging_policy is given".into(),
            )
        })?;
        if !(temperature > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "key `logging_temperature` = {temperature} must be positive"
            )));
        }
        Ok(table.iter().map(|row| softmax(row, temperature)).collect())
    }

    /// The exact discrete DGP behind an OPE config: uniform contexts and the
    /// configured mean-reward table.
    pub fn discrete_dgp(&self) -> Result<DiscreteDgp> {
        DiscreteDgp::uniform_contexts(self.ope_reward_table()?.clone())
    }
}

fn softmax(row: &[f64], temperature: f64) -> Vec<f64> {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = row.iter().map(|v| ((v - max) / temperature).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Draws a two-arm experiment with outcome
/// `y = rho u + ate 1[treated] + eps`, `u ~ N(0, 1)`,
/// `eps ~ N(0, 1 - rho^2)`, so that within each arm `Var(y) = 1` and
/// `corr(y, u) = rho`. Returns the experiment together with the oracle
/// covariate model `f(x) = rho u`.
pub fn gen_ab_experiment(cfg: &SyntheticConfig) -> Result<(ABExperiment, RewardModel)> {
    let (p, ate, rho) = cfg.ab_params()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise_sd = (1.0 - rho * rho).sqrt();

    let covariates: Vec<f64> = (0..cfg.n).map(|_| rng.sample(StandardNormal)).collect();
    let noise: Vec<f64> = (0..cfg.n)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * noise_sd)
        .collect();

    let assignments: Vec<bool> = if cfg.exact_allocation.unwrap_or(false) {
        let treated = ((cfg.n as f64 * p).round() as usize).clamp(1, cfg.n - 1);
        let mut order: Vec<usize> = (0..cfg.n).collect();
        for i in 0..cfg.n - 1 {
            let j = rng.random_range(i..cfg.n);
            order.swap(i, j);
        }
        let mut flags = vec![false; cfg.n];
        for &unit in &order[..treated] {
            flags[unit] = true;
        }
        flags
    } else {
        // Redraw degenerate assignment vectors so both arms are populated;
        // the retry sequence is part of the deterministic stream.
        let mut flags: Vec<bool> = Vec::new();
        for _ in 0..1000 {
            flags = (0..cfg.n).map(|_| rng.random::<f64>() < p).collect();
            let treated = flags.iter().filter(|&&t| t).count();
            if treated > 0 && treated < cfg.n {
                break;
            }
            flags.clear();
        }
        if flags.is_empty() {
            return Err(Error::EmptyArm {
                arm: TREATMENT_ARM.into(),
            });
        }
        flags
    };

    let records: Vec<LoggedRecord> = (0..cfg.n)
        .map(|i| {
            let treated = assignments[i];
            LoggedRecord {
                context_id: i,
                covariates: vec![covariates[i]],
                action: usize::from(!treated),
                reward: rho * covariates[i] + ate * f64::from(treated) + noise[i],
                propensity: if treated { p } else { 1.0 - p },
                arm: Some(if treated { TREATMENT_ARM } else { CONTROL_ARM }.to_string()),
            }
        })
        .collect();

    let d = Dataset::ab_with_arms(records, (TREATMENT_ARM.into(), CONTROL_ARM.into()))?;
    let exp = ABExperiment::new(d, p)?;
    let oracle_model = RewardModel::Linear {
        intercept: 0.0,
        coefficients: vec![rho],
    };
    Ok((exp, oracle_model))
}

/// Draws a contextual-bandit log: contexts uniform, actions from the logging
/// policy, rewards from the table plus Gaussian noise. Records carry the
/// exact logging propensities. Returns the log and the logging policy.
pub fn gen_bandit_logs(cfg: &SyntheticConfig) -> Result<(Dataset, PolicyTable)> {
    let table = cfg.ope_reward_table()?.clone();
    let rows = cfg.logging_rows()?;
    if cfg.noise_sd < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "key `noise_sd` = {} must be non-negative",
            cfg.noise_sd
        )));
    }
    if cfg.n == 0 {
        return Err(Error::InvalidConfig("key `n` must be positive".into()));
    }
    let logging = PolicyTable::from_rows(rows.clone())?;
    let context_count = table.len();
    let action_count = table[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let records: Vec<LoggedRecord> = (0..cfg.n)
        .map(|_| {
            let x = rng.random_range(0..context_count);
            let a = sample_categorical(&rows[x], rng.random::<f64>());
            let noise: f64 = rng.sample(StandardNormal);
            LoggedRecord {
                context_id: x,
                covariates: vec![x as f64],
                action: a,
                reward: table[x][a] + cfg.noise_sd * noise,
                propensity: rows[x][a],
                arm: None,
            }
        })
        .collect();

    let d = Dataset::ope(records, action_count)?;
    Ok((d, logging))
}

fn sample_categorical(probs: &[f64], u: f64) -> usize {
    let mut cumulative = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return i;
        }
    }
    probs.len() - 1
}

/// Emits every `(x, a)` pair with integer multiplicity proportional to
/// `P(x) pi_0(a|x)`, so that sample means over the dataset equal population
/// expectations exactly. Requires noiseless rewards and logging
/// probabilities expressible as rationals with a common denominator of at
/// most [`MAX_EXHAUSTIVE_DENOMINATOR`]; recorded propensities are the exact
/// reconstructed rationals.
pub fn exhaustive_dataset(cfg: &SyntheticConfig) -> Result<Dataset> {
    let table = cfg.ope_reward_table()?.clone();
    if cfg.noise_sd != 0.0 {
        return Err(Error::InvalidConfig(
            "exhaustive enumeration requires `noise_sd` = 0".into(),
        ));
    }
    let rows = cfg.logging_rows()?;
    if rows.iter().flatten().any(|&p| p <= 0.0) {
        return Err(Error::InvalidConfig(
            "exhaustive enumeration requires strictly positive logging probabilities".into(),
        ));
    }

    let denominator = (1..=MAX_EXHAUSTIVE_DENOMINATOR)
        .find(|&q| {
            rows.iter().flatten().all(|&p| {
                let scaled = p * q as f64;
                (scaled - scaled.round()).abs() <= 1e-9 && scaled.round() >= 1.0
            })
        })
        .ok_or_else(|| {
            Error::InvalidConfig(format!(
                "logging probabilities are not representable with denominator <= {MAX_EXHAUSTIVE_DENOMINATOR}"
            ))
        })?;

    let action_count = table[0].len();
    let mut records = Vec::new();
    for (x, row) in rows.iter().enumerate() {
        for (a, &p) in row.iter().enumerate() {
            let multiplicity = (p * denominator as f64).round() as usize;
            let exact_propensity = multiplicity as f64 / denominator as f64;
            for _ in 0..multiplicity {
                records.push(LoggedRecord {
                    context_id: x,
                    covariates: vec![x as f64],
                    action: a,
                    reward: table[x][a],
                    propensity: exact_propensity,
                    arm: None,
                });
            }
        }
    }
    Dataset::ope(records, action_count)
}
