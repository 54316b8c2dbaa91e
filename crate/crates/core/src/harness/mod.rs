//! Experiments that measure the quantitative bounds of the theory at desk
//! scale and turn them into pass/fail checks.
//!
//! Every experiment returns an [`ExperimentResult`]: the measured series,
//! the fitted constants (always the maximum over samples and trials, never
//! an average), the tolerances, and a pass flag computed from those alone.
//! All randomness flows from [`ExperimentConfig::seed`], so a result is
//! reproducible bit for bit from its configuration.

mod evolution;
mod fit;
mod random;
mod result;
mod suites;

use serde::{Deserialize, Serialize};

pub use evolution::{
    exp_continuation, exp_continuous_dependence, exp_energy_growth, exp_iteration_contraction,
    exp_oracle_convergence, exp_regularized_family, exp_single_step, exp_uniqueness,
};
pub use fit::{gronwall_constant, loglog_slope, spearman, strictly_decreasing};
pub use random::{derive_seed, random_field, seeded_rng};
pub use result::{write_atomic, ExperimentResult, Series};
pub use suites::{
    exp_coifman_meyer, exp_envelope_axioms, exp_inequality_suites, exp_splitting, exp_trichotomy,
};

use crate::error::{Error, Result};
use crate::paraproduct::ParaConfig;

/// Settings shared by all experiments. Each experiment fixes its own
/// datum, horizon and sweep; the fields here only override them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub system: String,
    /// Points per axis.
    pub n: usize,
    pub s: f64,
    /// Euler step for experiments that do not sweep it.
    pub epsilon: f64,
    /// Overrides the experiment's own horizon.
    pub horizon: Option<f64>,
    /// Envelope slack.
    pub delta: f64,
    /// Paraproduct settings. The gap defaults to 2 here: with the library
    /// default of 8 the low-high part is empty on every grid below 1024
    /// points, which would make the paraproduct checks vacuous.
    pub para: ParaConfig,
    pub seed: u64,
    /// Overrides the number of random trials of the batch suites.
    pub trials: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: "burgers".into(),
            n: 256,
            s: 3.0,
            epsilon: 2f64.powi(-10),
            horizon: None,
            delta: 0.25,
            para: ParaConfig::with_gap(2),
            seed: 42,
            trials: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::Config(format!("n must be a power of two >= 8, got {}", self.n)));
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::Config(format!("s must be positive, got {}", self.s)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if let Some(t) = self.horizon {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("T must be positive, got {t}")));
            }
        }
        if self.trials == Some(0) {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        self.para.validate()
    }

    fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    fn horizon_or(&self, default: f64) -> f64 {
        self.horizon.unwrap_or(default)
    }
}

/// Experiment names in suite order.
pub const EXPERIMENTS: [&str; 13] = [
    "trichotomy",
    "coifman_meyer",
    "splitting",
    "single_step",
    "oracle_convergence",
    "energy_growth",
    "uniqueness",
    "iteration_contraction",
    "regularized_family",
    "continuous_dependence",
    "continuation",
    "envelope_axioms",
    "inequality_suites",
];

/// Runs one experiment by name on a pool sized by `PARAHYP_THREADS`.
pub fn run_experiment(name: &str, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    with_pool(|| dispatch(name, cfg))
}

/// Runs every experiment concurrently, returning results in suite order.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<Vec<ExperimentResult>> {
    use rayon::prelude::*;
    cfg.validate()?;
    with_pool(|| EXPERIMENTS.par_iter().map(|name| dispatch(name, cfg)).collect())
}

fn dispatch(name: &str, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    match name {
        "trichotomy" => exp_trichotomy(cfg),
        "coifman_meyer" => exp_coifman_meyer(cfg),
        "splitting" => exp_splitting(cfg),
        "single_step" => exp_single_step(cfg),
        "oracle_convergence" => exp_oracle_convergence(cfg),
        "energy_growth" => exp_energy_growth(cfg),
        "uniqueness" => exp_uniqueness(cfg),
        "iteration_contraction" => exp_iteration_contraction(cfg),
        "regularized_family" => exp_regularized_family(cfg),
        "continuous_dependence" => exp_continuous_dependence(cfg),
        "continuation" => exp_continuation(cfg),
        "envelope_axioms" => exp_envelope_axioms(cfg),
        "inequality_suites" => exp_inequality_suites(cfg),
        _ => Err(Error::Config(format!(
            "unknown experiment '{name}'; expected one of {}",
            EXPERIMENTS.join(", ")
        ))),
    }
}

/// Runs `f` on a pool sized by `PARAHYP_THREADS` when set, otherwise on
/// one thread per core.
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = std::env::var("PARAHYP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
