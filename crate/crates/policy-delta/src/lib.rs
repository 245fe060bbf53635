//! Treatment-effect estimation for online experiments and logged bandit
//! feedback, under one roof.
//!
//! The crate implements both estimator families over a shared data model —
//! difference-in-means and its regression-adjusted variant for two-arm
//! experiments, inverse-propensity-scored and doubly robust estimators for
//! logged off-policy data — together with the finite-sample variance
//! estimators practitioners actually report. Mapping a two-arm experiment
//! into the off-policy formalism (the arm is the "action") makes the two
//! families coincide: [`equivalence`] constructs that mapping and checks the
//! resulting point and variance identities numerically on real data.
//!
//! Start with the runnable programs in `examples/`, one per capability:
//!
//! ```text
//! cargo run --example ab_experiment            # simulate + DiM
//! cargo run --example regression_adjustment    # RADiM and the 1 - rho^2 law
//! cargo run --example bandit_logs              # IPS / DR on bandit logs
//! cargo run --example exhaustive_oracle        # exact enumeration checks
//! cargo run --example ab_as_off_policy         # DiM as weighted estimation
//! cargo run --example radim_as_doubly_robust   # RADiM as doubly robust
//! cargo run --example coverage_sweep           # Monte Carlo summaries
//! ```
//!
//! A thin binary (`policy-delta`) exposes the same machinery over data
//! files via `simulate`, `estimate`, `verify`, and `sweep` subcommands.

pub mod cli;
pub mod data;
pub mod equivalence;
pub mod error;
pub mod estimate;
pub mod io;
pub mod model;
pub mod offpolicy;
pub mod onpolicy;
pub mod oracle;
pub mod policy;
pub mod sweep;
pub mod synth;

pub use data::{Dataset, Framing, LoggedRecord};
pub use error::{Error, Result};
pub use estimate::EstimateResult;
pub use model::RewardModel;
pub use policy::PolicyTable;
