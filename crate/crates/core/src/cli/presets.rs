//! Named experiment presets. Each is a pure function of the horizon,
//! replication count and seed.
//!
//! The switching instances place three breakpoints at `T/4`, `T/2` and
//! `3T/4`. Their means are hand-picked approximations, not exact reference
//! values.

use crate::envs::{ArmModel, EnvironmentSpec, Phase};
use crate::error::{Error, Result};
use crate::harness::ExperimentConfig;
use crate::policy::PolicySpec;
use crate::sda::MemoryForm;

pub const DEFAULT_HORIZON: u64 = 10_000;
pub const DEFAULT_REPLICATIONS: u64 = 2000;

/// Arm means of the two-arm stationary instance.
pub const STATIONARY_MEANS: [f64; 2] = [0.05, 0.15];

/// Per-phase means of the three-arm Bernoulli switching instance.
pub const BERNOULLI_SWITCHING_MEANS: [[f64; 3]; 4] = [
    [0.50, 0.30, 0.40],
    [0.50, 0.70, 0.40],
    [0.50, 0.45, 0.80],
    [0.30, 0.55, 0.40],
];

/// Per-phase means of the three-arm Gaussian switching instances.
pub const GAUSSIAN_SWITCHING_MEANS: [[f64; 3]; 4] = [
    [1.0, 0.5, 0.0],
    [0.0, 1.0, 0.5],
    [0.5, 0.0, 1.0],
    [1.0, 0.5, 0.0],
];

/// σ of each phase of the varying-σ instance.
pub const SIGMA_PATH: [f64; 4] = [0.5, 0.25, 1.0, 0.25];

#[derive(Debug, Clone, Copy)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "fig3-bernoulli-stationary",
        description: "2 Bernoulli arms (0.05, 0.15); LB-SDA, LB-SDA-LM (additive, floor 50), kl-UCB, TS",
    },
    PresetInfo {
        name: "fig4-bernoulli-switching",
        description: "3 Bernoulli arms, 4 phases; SW-LB-SDA against forgetting baselines and EXP3S",
    },
    PresetInfo {
        name: "fig5-gauss-switching",
        description: "3 Gaussian arms, sigma = 0.5, 4 phases; SW-LB-SDA against forgetting baselines and UCB1",
    },
    PresetInfo {
        name: "gauss-sigma-varying",
        description: "same Gaussian means with sigma = 0.5, 0.25, 1, 0.25 per phase",
    },
];

/// Phase start times for `n` equal phases over `1..=horizon`.
fn phase_starts(horizon: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| 1 + i * horizon / n as u64).collect()
}

fn switching(horizon: u64, arms: impl Fn(usize) -> Result<Vec<ArmModel>>) -> Result<EnvironmentSpec> {
    let mut phases = Vec::new();
    let mut last = 0;
    for (i, start) in phase_starts(horizon, 4).into_iter().enumerate() {
        // very short horizons collapse phases
        if start > last {
            phases.push(Phase { start, arms: arms(i)? });
            last = start;
        }
    }
    EnvironmentSpec::new(horizon, phases)
}

pub fn bernoulli_stationary_environment(horizon: u64) -> Result<EnvironmentSpec> {
    EnvironmentSpec::stationary(
        horizon,
        STATIONARY_MEANS.iter().map(|&m| ArmModel::bernoulli(m)).collect::<Result<_>>()?,
    )
}

pub fn bernoulli_switching_environment(horizon: u64) -> Result<EnvironmentSpec> {
    switching(horizon, |i| {
        BERNOULLI_SWITCHING_MEANS[i].iter().map(|&m| ArmModel::bernoulli(m)).collect()
    })
}

/// Gaussian switching instance with σ per phase.
pub fn gaussian_switching_environment(horizon: u64, sigmas: [f64; 4]) -> Result<EnvironmentSpec> {
    switching(horizon, |i| {
        GAUSSIAN_SWITCHING_MEANS[i]
            .iter()
            .map(|&m| ArmModel::gaussian(m, sigmas[i]))
            .collect()
    })
}

fn named(names: &[&str]) -> Vec<PolicySpec> {
    names.iter().map(|n| PolicySpec::named(n)).collect()
}

fn config(env: EnvironmentSpec, policies: Vec<PolicySpec>, replications: u64, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(env, policies);
    cfg.replications = replications;
    cfg.base_seed = seed;
    cfg
}

/// Expands a preset; `None` arguments take the preset defaults.
pub fn expand(name: &str, horizon: Option<u64>, replications: Option<u64>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let t = horizon.unwrap_or(DEFAULT_HORIZON);
    let reps = replications.unwrap_or(DEFAULT_REPLICATIONS);
    let seed = seed.unwrap_or(0);
    Ok(match name {
        "fig3-bernoulli-stationary" => {
            let mut lm = PolicySpec::named("lb-sda-lm");
            lm.schedule = Some(MemoryForm::Additive);
            lm.floor = Some(50);
            let policies = vec![
                PolicySpec::named("lb-sda"),
                lm,
                PolicySpec::named("klucb"),
                PolicySpec::named("ts"),
            ];
            config(bernoulli_stationary_environment(t)?, policies, reps, seed)
        }
        "fig4-bernoulli-switching" => config(
            bernoulli_switching_environment(t)?,
            named(&["sw-lb-sda", "sw-klucb", "d-klucb", "sw-ts", "dts", "exp3s"]),
            reps,
            seed,
        ),
        "fig5-gauss-switching" => config(
            gaussian_switching_environment(t, [0.5; 4])?,
            named(&["sw-lb-sda", "sw-ucb", "d-ucb", "sw-klucb", "d-klucb", "sw-ts", "dts", "ucb1"]),
            reps,
            seed,
        ),
        "gauss-sigma-varying" => config(
            gaussian_switching_environment(t, SIGMA_PATH)?,
            named(&["sw-lb-sda", "sw-ucb", "d-ucb", "sw-klucb", "d-klucb", "sw-ts", "dts", "ucb1"]),
            reps,
            seed,
        ),
        other => {
            return Err(Error::Argument(format!(
                "unknown preset {other:?}; available: {}",
                PRESETS.iter().map(|p| p.name).collect::<Vec<_>>().join(", ")
            )))
        }
    })
}
