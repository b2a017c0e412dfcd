use serde::{Deserialize, Serialize};

use super::run::RunRecord;
use crate::policy::PolicySpec;
use crate::verify::trajectory::{Trajectory, Violation};

/// Empirical quantile with linear interpolation between order statistics
/// (`sorted` must be ascending and non-empty).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Distribution of the final regret over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl FinalSummary {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut s = values.to_vec();
        s.sort_by(f64::total_cmp);
        FinalSummary {
            mean,
            std_dev: var.sqrt(),
            min: s[0],
            q25: quantile(&s, 0.25),
            median: quantile(&s, 0.5),
            q75: quantile(&s, 0.75),
            max: s[s.len() - 1],
        }
    }
}

/// Aggregated results of one policy.
#[derive(Debug, Clone)]
pub struct PolicyResult {
    pub label: String,
    pub spec: PolicySpec,
    /// Mean regret at each checkpoint.
    pub mean: Vec<f64>,
    pub q25: Vec<f64>,
    pub q75: Vec<f64>,
    /// Regret at `T` of every replication, in seed order.
    pub final_regrets: Vec<f64>,
    pub final_summary: FinalSummary,
    /// Per-replication regret at each checkpoint (`[replication][checkpoint]`).
    pub regret_at_checkpoints: Vec<Vec<f64>>,
    pub mean_pulls: Vec<f64>,
    /// Largest stored history per arm over every replication.
    pub storage_high_water: Vec<usize>,
    pub rounds_checked: u64,
    pub invariant_violations: u64,
    pub first_violation: Option<(u64, Violation)>,
    pub clamped_rewards: u64,
    pub wall_time: f64,
    pub trajectories: Vec<Trajectory>,
}

impl PolicyResult {
    /// Aggregates runs given in seed order whose `cumulative_regret` holds the
    /// values at `checkpoints`.
    pub fn from_runs(spec: &PolicySpec, checkpoints: &[u64], runs: Vec<RunRecord>, wall_time: f64) -> Self {
        let n = runs.len();
        let mut mean = Vec::with_capacity(checkpoints.len());
        let mut q25 = Vec::with_capacity(checkpoints.len());
        let mut q75 = Vec::with_capacity(checkpoints.len());
        let mut column = Vec::with_capacity(n);
        for c in 0..checkpoints.len() {
            column.clear();
            column.extend(runs.iter().map(|r| r.cumulative_regret[c]));
            mean.push(column.iter().sum::<f64>() / n as f64);
            column.sort_by(f64::total_cmp);
            q25.push(quantile(&column, 0.25));
            q75.push(quantile(&column, 0.75));
        }
        let final_regrets: Vec<f64> = runs.iter().map(|r| r.final_regret()).collect();
        let k = runs.first().map_or(0, |r| r.pulls.len());
        let mean_pulls = (0..k)
            .map(|a| runs.iter().map(|r| r.pulls[a] as f64).sum::<f64>() / n as f64)
            .collect();
        let mut storage_high_water: Vec<usize> = Vec::new();
        for r in &runs {
            if storage_high_water.is_empty() {
                storage_high_water = r.storage_high_water.clone();
            } else {
                for (h, &s) in storage_high_water.iter_mut().zip(&r.storage_high_water) {
                    *h = (*h).max(s);
                }
            }
        }
        let first_violation = runs
            .iter()
            .find_map(|r| r.first_violation.clone().map(|v| (r.seed, v)));
        PolicyResult {
            label: spec.label().to_string(),
            spec: spec.clone(),
            mean,
            q25,
            q75,
            final_summary: FinalSummary::from_values(&final_regrets),
            final_regrets,
            regret_at_checkpoints: runs.iter().map(|r| r.cumulative_regret.clone()).collect(),
            mean_pulls,
            storage_high_water,
            rounds_checked: runs.iter().map(|r| r.rounds_checked).sum(),
            invariant_violations: runs.iter().map(|r| r.invariant_violations).sum(),
            first_violation,
            clamped_rewards: runs.iter().map(|r| r.clamped_rewards).sum(),
            wall_time,
            trajectories: runs.into_iter().filter_map(|r| r.trajectory).collect(),
        }
    }
}

/// Results of a whole experiment, policies in config order.
#[derive(Debug, Clone)]
pub struct AggregateResult {
    pub horizon: u64,
    pub checkpoints: Vec<u64>,
    pub seeds: Vec<u64>,
    pub policies: Vec<PolicyResult>,
}

impl AggregateResult {
    pub fn policy(&self, label: &str) -> Option<&PolicyResult> {
        self.policies.iter().find(|p| p.label == label)
    }

    pub fn total_violations(&self) -> u64 {
        self.policies.iter().map(|p| p.invariant_violations).sum()
    }

    /// Position of step `t` among the checkpoints.
    pub fn checkpoint_index(&self, t: u64) -> Option<usize> {
        self.checkpoints.binary_search(&t).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&s, 0.25), 1.75);
        assert_eq!(quantile(&s, 0.75), 3.25);
        assert_eq!(quantile(&[0.4], 0.25), 0.4);
        assert_eq!(quantile(&s, 0.0), 1.0);
        assert_eq!(quantile(&s, 1.0), 4.0);
    }

    #[test]
    fn bands_are_ordered() {
        let runs: Vec<RunRecord> = (0..7)
            .map(|i| RunRecord {
                seed: i,
                cumulative_regret: vec![i as f64, (7 - i) as f64 * 2.0],
                pulls: vec![1, 1],
                storage_high_water: vec![],
                rounds_checked: 0,
                invariant_violations: 0,
                first_violation: None,
                clamped_rewards: 0,
                wall_time: 0.0,
                trajectory: None,
            })
            .collect();
        let r = PolicyResult::from_runs(&PolicySpec::named("ucb1"), &[1, 2], runs, 0.0);
        for c in 0..2 {
            assert!(r.q25[c] <= r.q75[c]);
        }
        assert_eq!(r.mean[0], 3.0);
        assert_eq!(r.final_summary.max, 14.0);
    }
}
