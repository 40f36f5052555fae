//! Seeded Monte Carlo experiments over the permutation-challenge games.
//!
//! Every trial draws its permutation and secret from a seed derived from the
//! master seed and the trial index alone, so results do not depend on the
//! number of worker threads or on scheduling.

pub mod config;
pub mod output;
pub mod runner;
pub mod shearer;
pub mod stats;

use permchal_core::pcmodel::GameError;
use thiserror::Error;

pub use config::{default_grid, load_config};
pub use output::{write_csv, write_json, CSV_COLUMNS, CSV_VERSION_LINE};
pub use runner::{run_trials, sweep_grid, with_jobs, ExperimentReport, ExperimentSpec, RunOptions};
pub use shearer::{verify_inequalities, InequalitySummary};
pub use stats::{derive_trial_seed, wilson_interval};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl HarnessError {
    /// 2 for bad input, 3 for an adversary breaking its contract, 4 for a
    /// failed `--assert` check, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Game(e) if e.is_contract_violation() => 3,
            HarnessError::Validation(_) | HarnessError::Game(_) | HarnessError::Config(_) => 2,
            HarnessError::Assertion(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

#[cfg(test)]
mod tests {
    use super::*;
    use permchal_core::pcmodel::ContractViolation;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Game(ContractViolation::SecondPlan.into()).exit_code(), 3);
        assert_eq!(HarnessError::Game(GameError::NotPrime(4)).exit_code(), 2);
        assert_eq!(HarnessError::Validation("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Assertion("x".into()).exit_code(), 4);
        assert_eq!(HarnessError::Io(std::io::Error::other("x")).exit_code(), 1);
    }
}
