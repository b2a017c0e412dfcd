//! Replication loop, dynamic-regret accounting, aggregation across seeds and
//! persistence of results.

mod aggregate;
mod persist;
mod run;

use serde::{Deserialize, Serialize};

pub use aggregate::{quantile, AggregateResult, FinalSummary, PolicyResult};
pub use persist::{persist, read_csv, write_csv, CsvRow, Manifest, PersistedFiles, CSV_HEADER};
pub use run::{run_experiment, run_replication, RunRecord};

use crate::envs::EnvironmentSpec;
use crate::error::{Error, Result, ValidationIssue};
use crate::policy::PolicySpec;

/// Default number of log-spaced checkpoints.
pub const DEFAULT_CHECKPOINTS: usize = 200;

/// Time steps at which aggregated regret is reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Checkpoints {
    /// About `n` log-spaced steps, always including `T`.
    Log(usize),
    /// Every step `1..=T`.
    All,
    /// Explicit steps (kept if within `1..=T`).
    List(Vec<u64>),
}

impl Default for Checkpoints {
    fn default() -> Self {
        Checkpoints::Log(DEFAULT_CHECKPOINTS)
    }
}

impl Checkpoints {
    /// Sorted, de-duplicated steps for horizon `T`.
    pub fn resolve(&self, horizon: u64) -> Vec<u64> {
        let mut steps: Vec<u64> = match self {
            Checkpoints::All => (1..=horizon).collect(),
            Checkpoints::List(v) => v.iter().copied().filter(|&t| t >= 1 && t <= horizon).collect(),
            Checkpoints::Log(0) => Vec::new(),
            Checkpoints::Log(n) => {
                let top = (horizon as f64).ln();
                let n = *n;
                let mut v: Vec<u64> = (0..n)
                    .map(|i| {
                        let x = if n == 1 { top } else { top * i as f64 / (n - 1) as f64 };
                        (x.exp().round() as u64).clamp(1, horizon)
                    })
                    .collect();
                v.push(horizon);
                v
            }
        };
        steps.sort_unstable();
        steps.dedup();
        steps
    }
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub environment: EnvironmentSpec,
    pub policies: Vec<PolicySpec>,
    pub replications: u64,
    pub base_seed: u64,
    #[serde(default)]
    pub record_trajectories: bool,
    #[serde(default)]
    pub invariant_checks: bool,
    #[serde(default)]
    pub checkpoints: Checkpoints,
}

impl ExperimentConfig {
    pub fn new(environment: EnvironmentSpec, policies: Vec<PolicySpec>) -> Self {
        ExperimentConfig {
            environment,
            policies,
            replications: 1,
            base_seed: 0,
            record_trajectories: false,
            invariant_checks: false,
            checkpoints: Checkpoints::default(),
        }
    }

    pub fn horizon(&self) -> u64 {
        self.environment.horizon()
    }

    /// Seed of replication `i`.
    pub fn seed(&self, i: u64) -> u64 {
        self.base_seed.wrapping_add(i)
    }

    /// Collects every constraint violation instead of stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        if self.replications < 1 {
            issues.push(ValidationIssue {
                key: "replications".into(),
                message: "must be >= 1".into(),
            });
        }
        if self.policies.is_empty() {
            issues.push(ValidationIssue {
                key: "policies".into(),
                message: "at least one policy is required".into(),
            });
        }
        let family = self.environment.family();
        let k = self.environment.num_arms();
        for (i, p) in self.policies.iter().enumerate() {
            if let Err(e) = p.check(family, k) {
                issues.push(ValidationIssue {
                    key: format!("policies[{i}]"),
                    message: e.to_string(),
                });
            }
            if p.label().is_empty() || p.label().contains([',', '"', '\n', '\r']) {
                issues.push(ValidationIssue {
                    key: format!("policies[{i}].label"),
                    message: format!("{:?} must be non-empty without commas, quotes or newlines", p.label()),
                });
            }
            if self.policies[..i].iter().any(|q| q.label() == p.label()) {
                issues.push(ValidationIssue {
                    key: format!("policies[{i}].label"),
                    message: format!("duplicate label {:?}", p.label()),
                });
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }
}
