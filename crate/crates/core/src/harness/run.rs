use std::time::Instant;

use rayon::prelude::*;

use super::aggregate::{AggregateResult, PolicyResult};
use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::policy::PolicySpec;
use crate::verify::trajectory::{checker_for, RoundChecker, StorageChecker, Trajectory, TrajectoryKind, Violation};

/// Outcome of one replication of one policy.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub seed: u64,
    /// Cumulative dynamic regret after each of the `T` pulls.
    pub cumulative_regret: Vec<f64>,
    pub pulls: Vec<u64>,
    /// Largest number of rewards stored per arm (empty for policies without
    /// meaningful storage).
    pub storage_high_water: Vec<usize>,
    pub rounds_checked: u64,
    pub invariant_violations: u64,
    pub first_violation: Option<Violation>,
    /// Rewards clamped by the policy (EXP3S rescaling).
    pub clamped_rewards: u64,
    pub wall_time: f64,
    pub trajectory: Option<Trajectory>,
}

impl RunRecord {
    pub fn final_regret(&self) -> f64 {
        self.cumulative_regret.last().copied().unwrap_or(0.0)
    }

    /// Regret after step `t` (1-based).
    pub fn regret_at(&self, t: u64) -> f64 {
        self.cumulative_regret[(t - 1) as usize]
    }
}

/// Simulates `policy` for exactly `T` pulls with the stream seeded by `seed`.
///
/// Arms of a round are pulled in order and the round is cut after the pull
/// reaching `T`. Each pull at step `t` samples from the phase active at `t`
/// and adds `μ⋆_t - μ_{A_t,t}` to the regret.
pub fn run_replication(config: &ExperimentConfig, policy: &PolicySpec, seed: u64) -> Result<RunRecord> {
    let env = &config.environment;
    let mut p = policy.build(env)?;
    let started = Instant::now();
    let mut rng = crate::sim_rng(seed);
    let horizon = env.horizon();
    let k = env.num_arms();

    let best: Vec<f64> = env
        .phases()
        .iter()
        .map(|ph| ph.arms.iter().map(|a| a.mean).fold(f64::MIN, f64::max))
        .collect();

    let kind = p.trajectory_kind();
    let mut checkers: Vec<Box<dyn RoundChecker + Send>> = Vec::new();
    if config.invariant_checks {
        if let Some(kind) = kind {
            checkers.push(checker_for(kind, k)?);
            if kind != TrajectoryKind::LbSdaLm {
                // stored <= pulled holds for every round-based policy
                checkers.push(Box::new(StorageChecker::new()));
            }
        }
    }
    let mut trajectory = match kind {
        Some(kind) if config.record_trajectories => Some(Trajectory::new(kind, k)),
        _ => None,
    };

    let mut regret = Vec::with_capacity(horizon as usize);
    let mut pulls = vec![0u64; k];
    let mut high_water: Vec<usize> = Vec::new();
    let mut cum = 0.0;
    let mut t = 0u64;
    'rounds: while t < horizon {
        let set = p.select(&mut rng);
        if let Some(rec) = p.round_record() {
            checkers.iter_mut().for_each(|c| c.push(&rec));
            if let Some(tr) = trajectory.as_mut() {
                tr.rounds.push(rec);
            }
        }
        if set.is_empty() {
            return Err(Error::Argument(format!("{} selected no arm", policy.label())));
        }
        for &arm in &set {
            if arm >= k {
                return Err(Error::Argument(format!("{} selected arm {arm}", policy.label())));
            }
            t += 1;
            let phase = env.phase_index(t);
            let model = &env.phases()[phase].arms[arm];
            let reward = model.sample(&mut rng);
            cum += best[phase] - model.mean;
            regret.push(cum);
            pulls[arm] += 1;
            p.observe(arm, reward);
            if t == horizon {
                break 'rounds;
            }
        }
        p.end_round(&mut rng);
        raise_high_water(&mut high_water, p.stored_lengths());
    }
    raise_high_water(&mut high_water, p.stored_lengths());

    let mut rounds_checked = 0;
    let mut violations = 0;
    let mut first_violation = None;
    for c in &checkers {
        let r = c.report();
        rounds_checked = rounds_checked.max(r.rounds_checked);
        violations += r.violations;
        if first_violation.is_none() {
            first_violation = r.first.clone();
        }
    }

    Ok(RunRecord {
        seed,
        cumulative_regret: regret,
        pulls,
        storage_high_water: high_water,
        rounds_checked,
        invariant_violations: violations,
        first_violation,
        clamped_rewards: p.clamp_count(),
        wall_time: started.elapsed().as_secs_f64(),
        trajectory,
    })
}

fn raise_high_water(high: &mut Vec<usize>, stored: Option<Vec<usize>>) {
    let Some(stored) = stored else { return };
    if high.is_empty() {
        *high = stored;
    } else {
        high.iter_mut().zip(stored).for_each(|(h, s)| *h = (*h).max(s));
    }
}

/// Runs every policy of `config` over `replications` seeds on a pool of
/// `workers` threads (0 = rayon's default).
///
/// Replication `i` uses seed `base_seed + i`; results are merged in index
/// order so the output does not depend on the number of workers.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<AggregateResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Argument(format!("cannot build worker pool: {e}")))?;
    let checkpoints = config.checkpoints.resolve(config.horizon());
    let mut policies = Vec::with_capacity(config.policies.len());
    for spec in &config.policies {
        let started = Instant::now();
        let runs: Vec<Result<RunRecord>> = pool.install(|| {
            (0..config.replications)
                .into_par_iter()
                .map(|i| {
                    let seed = config.seed(i);
                    run_replication(config, spec, seed)
                        .map(|mut r| {
                            // keep memory bounded: only checkpoint values survive
                            r.cumulative_regret = checkpoints.iter().map(|&t| r.regret_at(t)).collect();
                            r
                        })
                        .map_err(|e| Error::Replication {
                            seed,
                            source: Box::new(e),
                        })
                })
                .collect()
        });
        let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
        policies.push(PolicyResult::from_runs(
            spec,
            &checkpoints,
            runs,
            started.elapsed().as_secs_f64(),
        ));
    }
    Ok(AggregateResult {
        horizon: config.horizon(),
        checkpoints,
        seeds: (0..config.replications).map(|i| config.seed(i)).collect(),
        policies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{ArmModel, EnvironmentSpec, Phase};

    fn bern(means: &[f64], horizon: u64) -> EnvironmentSpec {
        EnvironmentSpec::stationary(horizon, means.iter().map(|&m| ArmModel::bernoulli(m).unwrap()).collect()).unwrap()
    }

    #[test]
    fn fixed_arm_regret() {
        let cfg = ExperimentConfig::new(bern(&[0.9, 0.5], 3), vec![]);
        let mut spec = PolicySpec::named("fixed");
        spec.arm = Some(1);
        let r = run_replication(&cfg, &spec, 0).unwrap();
        let expected = [0.4, 0.8, 1.2];
        for (a, b) in r.cumulative_regret.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(r.pulls, vec![0, 3]);
    }

    #[test]
    fn oracle_has_zero_regret() {
        let env = EnvironmentSpec::new(
            300,
            vec![
                Phase { start: 1, arms: vec![ArmModel::bernoulli(0.2).unwrap(), ArmModel::bernoulli(0.7).unwrap()] },
                Phase { start: 101, arms: vec![ArmModel::bernoulli(0.9).unwrap(), ArmModel::bernoulli(0.7).unwrap()] },
            ],
        )
        .unwrap();
        let cfg = ExperimentConfig::new(env, vec![]);
        let r = run_replication(&cfg, &PolicySpec::named("oracle"), 4).unwrap();
        assert!(r.cumulative_regret.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rounds_truncated_at_horizon() {
        for horizon in [1, 2, 5, 17, 1000] {
            let cfg = ExperimentConfig::new(bern(&[0.3, 0.4, 0.5, 0.6, 0.7], horizon), vec![]);
            for name in ["lb-sda", "lb-sda-lm", "sw-lb-sda"] {
                let r = run_replication(&cfg, &PolicySpec::named(name), 1).unwrap();
                assert_eq!(r.pulls.iter().sum::<u64>(), horizon);
                assert_eq!(r.cumulative_regret.len() as u64, horizon);
            }
        }
    }

    #[test]
    fn mid_round_breakpoint_uses_new_phase() {
        // round 1 pulls arms 0..3 at t = 1..4 and the best arm changes at t = 3
        let b = |m: f64| ArmModel::bernoulli(m).unwrap();
        let env = EnvironmentSpec::new(
            4,
            vec![
                Phase { start: 1, arms: vec![b(0.0), b(0.0), b(0.0), b(1.0)] },
                Phase { start: 3, arms: vec![b(0.0), b(0.0), b(1.0), b(0.0)] },
            ],
        )
        .unwrap();
        let cfg = ExperimentConfig::new(env, vec![]);
        let r = run_replication(&cfg, &PolicySpec::named("lb-sda"), 0).unwrap();
        assert_eq!(r.cumulative_regret, vec![1.0, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn lbsda_sanity_on_bernoulli_pair() {
        let cfg = ExperimentConfig::new(bern(&[0.05, 0.15], 10_000), vec![]);
        let r = run_replication(&cfg, &PolicySpec::named("lb-sda"), 17).unwrap();
        assert!(r.final_regret().is_finite());
        assert!(r.pulls[0] < 1000, "{:?}", r.pulls);
        assert!(r.cumulative_regret.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.final_regret() <= 10_000.0 * 0.1 + 1e-9);
    }

    #[test]
    fn experiment_is_schedule_independent() {
        let mut cfg = ExperimentConfig::new(
            bern(&[0.3, 0.5], 500),
            vec![PolicySpec::named("lb-sda"), PolicySpec::named("ts")],
        );
        cfg.replications = 6;
        cfg.base_seed = 3;
        let a = run_experiment(&cfg, 1).unwrap();
        let b = run_experiment(&cfg, 4).unwrap();
        assert_eq!(a.policies[0].mean, b.policies[0].mean);
        assert_eq!(a.policies[1].q75, b.policies[1].q75);
        assert_eq!(a.seeds, vec![3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn single_replication_mean_is_the_run() {
        let mut cfg = ExperimentConfig::new(bern(&[0.3, 0.5], 200), vec![PolicySpec::named("ucb1")]);
        cfg.checkpoints = super::super::Checkpoints::All;
        let agg = run_experiment(&cfg, 1).unwrap();
        let run = run_replication(&cfg, &cfg.policies[0], 0).unwrap();
        assert_eq!(agg.policies[0].mean, run.cumulative_regret);
        assert_eq!(agg.policies[0].q25, run.cumulative_regret);
    }

    #[test]
    fn failing_replication_reports_seed() {
        let env = EnvironmentSpec::stationary(10, vec![ArmModel::poisson(1.0).unwrap(); 2]).unwrap();
        let mut cfg = ExperimentConfig::new(env, vec![PolicySpec::named("ts")]);
        cfg.base_seed = 9;
        assert!(run_experiment(&cfg, 1).is_err());
        // validation catches it first; a direct run reports the policy error
        assert!(matches!(run_replication(&cfg, &cfg.policies[0], 9), Err(Error::Unsupported(_))));
    }
}
