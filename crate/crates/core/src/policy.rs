//! The policy interface shared by the dueling algorithms and the baselines,
//! and construction of policies from their config description.

use serde::{Deserialize, Serialize};

use crate::baselines::{self, tuning};
use crate::envs::{EnvironmentSpec, Family};
use crate::error::{Error, Result};
use crate::sda::{self, MemoryForm, MemorySchedule};
use crate::verify::trajectory::{RoundRecord, TrajectoryKind};
use crate::SimRng;

/// A bandit policy driven round by round.
///
/// The harness calls [`Policy::select`], pulls the returned arms in order
/// (feeding each reward to [`Policy::observe`]) and finally calls
/// [`Policy::end_round`]. Step-based policies return one arm per round.
pub trait Policy: Send {
    fn num_arms(&self) -> usize;

    /// Arms pulled in the next round, ascending and never empty.
    fn select(&mut self, rng: &mut SimRng) -> Vec<usize>;

    fn observe(&mut self, arm: usize, reward: f64);

    fn end_round(&mut self, _rng: &mut SimRng) {}

    /// Rewards currently stored per arm, for policies whose storage is
    /// meaningful.
    fn stored_lengths(&self) -> Option<Vec<usize>> {
        None
    }

    /// Which trajectory checker applies to this policy, if any.
    fn trajectory_kind(&self) -> Option<TrajectoryKind> {
        None
    }

    /// Snapshot of the decision taken by the last `select` call.
    fn round_record(&self) -> Option<RoundRecord> {
        None
    }

    /// Number of rewards clamped into the policy's admissible range.
    fn clamp_count(&self) -> u64 {
        0
    }
}

/// A policy entry of an experiment config: a registered name plus optional
/// parameters. Missing tuning parameters are derived from the environment
/// when the policy is built.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub name: String,
    /// Name used in reports; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Sliding window length (rounds for SW-LB-SDA, steps otherwise).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<u64>,
    /// Discount factor of discounted policies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Exploration constant ξ of SW-UCB / D-UCB.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    /// Reward bound B of the UCB-type policies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Known Gaussian standard deviation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// EXP3S weight-sharing parameter α.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// EXP3S exploration rate γ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exploration: Option<f64>,
    /// LB-SDA-LM memory schedule form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<MemoryForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
    /// Arm pulled by the `fixed` policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm: Option<usize>,
}

pub const POLICY_NAMES: &[&str] = &[
    "lb-sda", "lb-sda-lm", "sw-lb-sda", "ucb1", "klucb", "ts", "sw-ucb", "d-ucb", "sw-klucb",
    "d-klucb", "sw-ts", "dts", "exp3s", "fixed", "oracle",
];

impl PolicySpec {
    pub fn named(name: &str) -> Self {
        PolicySpec {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }

    pub fn memory_schedule(&self) -> MemorySchedule {
        MemorySchedule {
            form: self.schedule.unwrap_or(MemoryForm::Additive),
            floor: self.floor.unwrap_or(50),
            coefficient: self.coefficient.unwrap_or(1.0),
        }
    }

    /// Policies whose decisions are round sets rather than single arms.
    pub fn is_round_based(&self) -> bool {
        matches!(self.name.as_str(), "lb-sda" | "lb-sda-lm" | "sw-lb-sda")
    }

    /// Checks the name and that the policy can run on `family`.
    pub fn check(&self, family: Family, num_arms: usize) -> Result<()> {
        if !POLICY_NAMES.contains(&self.name.as_str()) {
            return Err(Error::Config(format!("unknown policy {:?}", self.name)));
        }
        if matches!(self.name.as_str(), "ts" | "sw-ts" | "dts")
            && !matches!(family, Family::Bernoulli | Family::Gaussian)
        {
            return Err(Error::Unsupported(format!(
                "{} is only available for bernoulli and gaussian arms",
                self.name
            )));
        }
        if let Some(tau) = self.tau {
            if tau < num_arms as u64 {
                return Err(Error::Config(format!(
                    "{}: tau = {tau} must be >= number of arms {num_arms}",
                    self.label()
                )));
            }
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::Config(format!(
                    "{}: gamma = {g} must lie in (0,1)",
                    self.label()
                )));
            }
        }
        if let Some(arm) = self.arm {
            if arm >= num_arms {
                return Err(Error::Config(format!("fixed arm {arm} out of range")));
            }
        }
        Ok(())
    }

    /// Sliding window used when `tau` is not given.
    pub fn resolved_tau(&self, env: &EnvironmentSpec) -> u64 {
        self.tau.unwrap_or_else(|| {
            let gaussian_adapted = env.family() == Family::Gaussian && self.name == "sw-ucb";
            tuning::sliding_window(env, gaussian_adapted)
        })
    }

    pub fn resolved_gamma(&self, env: &EnvironmentSpec) -> f64 {
        self.gamma.unwrap_or_else(|| {
            let gaussian_adapted = env.family() == Family::Gaussian && self.name == "d-ucb";
            tuning::discount(env, gaussian_adapted)
        })
    }

    /// Instantiates the policy for `env`.
    pub fn build(&self, env: &EnvironmentSpec) -> Result<Box<dyn Policy>> {
        let k = env.num_arms();
        let family = env.family();
        self.check(family, k)?;
        let sigma = self.sigma.unwrap_or_else(|| env.max_scale());
        let bound = self.bound.unwrap_or_else(|| tuning::reward_bound(env));
        let xi = self.xi.unwrap_or(baselines::DEFAULT_XI);
        use baselines::{Forgetting, IndexKind, IndexPolicy, Thompson};
        let forgetting_sw = || Forgetting::Window(self.resolved_tau(env));
        let forgetting_d = || Forgetting::Discount(self.resolved_gamma(env));
        let p: Box<dyn Policy> = match self.name.as_str() {
            "lb-sda" => Box::new(sda::LbSda::new(k)),
            "lb-sda-lm" => Box::new(sda::LbSda::with_memory(k, self.memory_schedule())),
            "sw-lb-sda" => Box::new(sda::SwLbSda::new(k, self.resolved_tau(env))?),
            // plain UCB1: the Gaussian range adaptation only applies to the
            // forgetting variants
            "ucb1" => Box::new(IndexPolicy::new(
                k,
                IndexKind::Ucb1 {
                    bound: self.bound.unwrap_or(1.0),
                },
                Forgetting::None,
            )),
            "sw-ucb" => Box::new(IndexPolicy::new(k, IndexKind::Ucb { bound, xi }, forgetting_sw())),
            "d-ucb" => Box::new(IndexPolicy::new(k, IndexKind::Ucb { bound, xi }, forgetting_d())),
            "klucb" => Box::new(IndexPolicy::new(
                k,
                IndexKind::KlUcb { family, sigma },
                Forgetting::None,
            )),
            "sw-klucb" => Box::new(IndexPolicy::new(k, IndexKind::KlUcb { family, sigma }, forgetting_sw())),
            "d-klucb" => Box::new(IndexPolicy::new(k, IndexKind::KlUcb { family, sigma }, forgetting_d())),
            "ts" => Box::new(Thompson::new(k, family, sigma, Forgetting::None)?),
            "sw-ts" => Box::new(Thompson::new(k, family, sigma, forgetting_sw())?),
            "dts" => Box::new(Thompson::new(k, family, sigma, forgetting_d())?),
            "exp3s" => {
                let (alpha, gamma) = tuning::exp3s_parameters(env);
                let scale = if family == Family::Gaussian {
                    Some(1.0 + 2.0 * sigma)
                } else {
                    None
                };
                Box::new(baselines::Exp3s::new(
                    k,
                    self.alpha.unwrap_or(alpha),
                    self.exploration.unwrap_or(gamma),
                    scale,
                )?)
            }
            "fixed" => Box::new(FixedArm {
                arm: self.arm.unwrap_or(0),
                k,
            }),
            "oracle" => Box::new(OracleArm::new(env.clone())),
            other => return Err(Error::Config(format!("unknown policy {other:?}"))),
        };
        Ok(p)
    }
}

/// Always pulls the same arm.
#[derive(Debug, Clone)]
pub struct FixedArm {
    pub arm: usize,
    pub k: usize,
}

impl Policy for FixedArm {
    fn num_arms(&self) -> usize {
        self.k
    }

    fn select(&mut self, _rng: &mut SimRng) -> Vec<usize> {
        vec![self.arm]
    }

    fn observe(&mut self, _arm: usize, _reward: f64) {}
}

/// Pulls the arm with the best mean at every step; needs the environment.
#[derive(Debug, Clone)]
pub struct OracleArm {
    env: EnvironmentSpec,
    t: u64,
}

impl OracleArm {
    pub fn new(env: EnvironmentSpec) -> Self {
        OracleArm { env, t: 0 }
    }
}

impl Policy for OracleArm {
    fn num_arms(&self) -> usize {
        self.env.num_arms()
    }

    fn select(&mut self, _rng: &mut SimRng) -> Vec<usize> {
        let t = (self.t + 1).min(self.env.horizon());
        let phase = &self.env.phases()[self.env.phase_index(t)];
        let best = (0..phase.arms.len())
            .max_by(|&a, &b| phase.arms[a].mean.total_cmp(&phase.arms[b].mean))
            .unwrap_or(0);
        vec![best]
    }

    fn observe(&mut self, _arm: usize, _reward: f64) {
        self.t += 1;
    }
}
