//! Monte Carlo replication driver for two-arm experiments.
//!
//! Runs the four ATE estimators over independently seeded replications of a
//! generator config and summarises bias, variance, and CI coverage per
//! estimator. Replication `i` uses `seed + i`; results come back in
//! replication order regardless of worker count, so runs are reproducible.
//! The `POLICY_DELTA_THREADS` environment variable caps parallelism.

use rayon::prelude::*;

use crate::equivalence::{
    ab_to_ope, center_reward_model, target_policies, PropensityMode,
};
use crate::error::{Error, Result};
use crate::estimate::EstimateResult;
use crate::offpolicy::{delta_beta_ips_estimate, delta_dr_estimate, estimate_beta_star};
use crate::onpolicy::{dim_estimate, radim_estimate};
use crate::synth::{gen_ab_experiment, SyntheticConfig};

const SWEEP_CI_LEVEL: f64 = 0.95;

/// The estimators a replication study can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepEstimator {
    /// Difference in means.
    Dim,
    /// Regression-adjusted difference in means with the generator's oracle
    /// covariate model.
    Radim,
    /// Delta-beta*-IPS on the re-framed experiment, `dof_loss = 2`.
    DBetaIps,
    /// Delta-DR on the re-framed experiment with the oracle model centred at
    /// `beta*`, `dof_loss = 2`.
    DeltaDr,
}

impl SweepEstimator {
    pub const ALL: [SweepEstimator; 4] = [
        SweepEstimator::Dim,
        SweepEstimator::Radim,
        SweepEstimator::DBetaIps,
        SweepEstimator::DeltaDr,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SweepEstimator::Dim => "dim",
            SweepEstimator::Radim => "radim",
            SweepEstimator::DBetaIps => "dbips",
            SweepEstimator::DeltaDr => "ddr",
        }
    }
}

/// Per-estimator summary over a replication study.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSummary {
    pub estimator: &'static str,
    /// Mean point estimate minus the configured truth.
    pub bias: f64,
    /// Sample variance of the point estimates; absent with fewer than two
    /// replications.
    pub empirical_variance: Option<f64>,
    /// Mean of the estimators' own variance-of-the-mean estimates.
    pub mean_estimated_variance: f64,
    /// Fraction of replications whose 95% interval covers the truth.
    pub coverage95: f64,
}

/// A rayon pool sized by `POLICY_DELTA_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("POLICY_DELTA_THREADS") {
        let threads: usize = raw.trim().parse().map_err(|_| {
            Error::InvalidConfig(format!("POLICY_DELTA_THREADS = {raw:?} is not a number"))
        })?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("could not build thread pool: {e}")))
}

fn one_replication(
    cfg: &SyntheticConfig,
    estimators: &[SweepEstimator],
    mode: PropensityMode,
) -> Result<Vec<EstimateResult>> {
    let (exp, oracle_model) = gen_ab_experiment(cfg)?;
    let (d_t, d_c) = exp.split()?;

    let needs_ope = estimators
        .iter()
        .any(|e| matches!(e, SweepEstimator::DBetaIps | SweepEstimator::DeltaDr));
    let ope = if needs_ope {
        let d_ope = ab_to_ope(&exp, mode)?;
        let (pi, pi_alt) = target_policies(&d_ope)?;
        let beta = estimate_beta_star(&d_ope, &pi, &pi_alt)?;
        Some((d_ope, pi, pi_alt, beta))
    } else {
        None
    };

    estimators
        .iter()
        .map(|estimator| match estimator {
            SweepEstimator::Dim => dim_estimate(&d_t, &d_c, SWEEP_CI_LEVEL),
            SweepEstimator::Radim => radim_estimate(&d_t, &d_c, &oracle_model, SWEEP_CI_LEVEL),
            SweepEstimator::DBetaIps => {
                let (d_ope, pi, pi_alt, beta) = ope.as_ref().expect("prepared above");
                delta_beta_ips_estimate(d_ope, pi, pi_alt, *beta, 2, SWEEP_CI_LEVEL)
            }
            SweepEstimator::DeltaDr => {
                let (d_ope, pi, pi_alt, beta) = ope.as_ref().expect("prepared above");
                let centered = center_reward_model(&oracle_model, d_ope, *beta)?;
                delta_dr_estimate(d_ope, pi, pi_alt, &centered, 2, SWEEP_CI_LEVEL)
            }
        })
        .collect()
}

/// Runs `replications` independently seeded draws of `base`, computing the
/// requested estimators on each. Returns one row of estimates per
/// replication, in replication order.
pub fn run_ab_replications(
    base: &SyntheticConfig,
    replications: usize,
    estimators: &[SweepEstimator],
    mode: PropensityMode,
) -> Result<Vec<Vec<EstimateResult>>> {
    if replications == 0 {
        return Err(Error::InvalidConfig("replications must be positive".into()));
    }
    let pool = thread_pool()?;
    pool.install(|| {
        (0..replications)
            .into_par_iter()
            .map(|i| one_replication(&base.replication(i as u64), estimators, mode))
            .collect()
    })
}

/// Summarises a replication study against the configured truth.
pub fn summarize(
    truth: f64,
    replications: &[Vec<EstimateResult>],
    estimators: &[SweepEstimator],
) -> Vec<EstimatorSummary> {
    let r = replications.len() as f64;
    estimators
        .iter()
        .enumerate()
        .map(|(idx, estimator)| {
            let points: Vec<f64> = replications.iter().map(|row| row[idx].point).collect();
            let mean_point = points.iter().sum::<f64>() / r;
            let empirical_variance = if points.len() >= 2 {
                let ss: f64 = points.iter().map(|p| (p - mean_point).powi(2)).sum();
                Some(ss / (points.len() - 1) as f64)
            } else {
                None
            };
            let mean_estimated_variance = replications
                .iter()
                .map(|row| row[idx].variance_of_mean)
                .sum::<f64>()
                / r;
            let covered = replications
                .iter()
                .filter(|row| row[idx].covers(truth))
                .count();
            EstimatorSummary {
                estimator: estimator.label(),
                bias: mean_point - truth,
                empirical_variance,
                mean_estimated_variance,
                coverage95: covered as f64 / r,
            }
        })
        .collect()
}
