//! Exponential-family arms and piecewise-stationary environments.
//!
//! Arms are parametrised by their mean everywhere. A phase with start time
//! `t_φ` governs every time step `t ≥ t_φ` up to the next phase start
//! (left-closed phases). Time steps are 1-based.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bernoulli,
    /// Gaussian with known standard deviation (`ArmModel::scale`).
    Gaussian,
    Poisson,
    Exponential,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Bernoulli => "bernoulli",
            Family::Gaussian => "gaussian",
            Family::Poisson => "poisson",
            Family::Exponential => "exponential",
        }
    }

    /// Checks that `mean` lies in the family's mean space.
    pub fn check_mean(self, mean: f64) -> std::result::Result<(), String> {
        if !mean.is_finite() {
            return Err(format!("mean must be finite, got {mean}"));
        }
        match self {
            Family::Bernoulli if !(0.0..=1.0).contains(&mean) => {
                Err(format!("bernoulli mean must lie in [0,1], got {mean}"))
            }
            Family::Poisson | Family::Exponential if mean <= 0.0 => {
                Err(format!("{} mean must be > 0, got {mean}", self.name()))
            }
            _ => Ok(()),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bernoulli" => Ok(Family::Bernoulli),
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "poisson" => Ok(Family::Poisson),
            "exponential" => Ok(Family::Exponential),
            other => Err(Error::Argument(format!("unknown family {other:?}"))),
        }
    }
}

/// A one-parameter exponential-family reward distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    pub family: Family,
    pub mean: f64,
    /// Standard deviation for Gaussian arms; 1.0 and ignored otherwise.
    pub scale: f64,
}

impl ArmModel {
    pub fn new(family: Family, mean: f64, scale: f64) -> Result<Self> {
        family.check_mean(mean).map_err(Error::Argument)?;
        if family == Family::Gaussian && !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Argument(format!(
                "gaussian scale must be > 0, got {scale}"
            )));
        }
        let scale = if family == Family::Gaussian { scale } else { 1.0 };
        Ok(ArmModel {
            family,
            mean,
            scale,
        })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(Family::Bernoulli, p, 1.0)
    }

    pub fn gaussian(mean: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::Gaussian, mean, sigma)
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::new(Family::Poisson, lambda, 1.0)
    }

    pub fn exponential(mean: f64) -> Result<Self> {
        Self::new(Family::Exponential, mean, 1.0)
    }

    /// Variance of a single reward.
    pub fn variance(&self) -> f64 {
        match self.family {
            Family::Bernoulli => self.mean * (1.0 - self.mean),
            Family::Gaussian => self.scale * self.scale,
            Family::Poisson => self.mean,
            Family::Exponential => self.mean * self.mean,
        }
    }

    pub fn comparable(&self, other: &ArmModel) -> bool {
        self.family == other.family
            && (self.family != Family::Gaussian || self.scale == other.scale)
    }

    /// The same-family model with a different mean.
    pub fn with_mean(&self, mean: f64) -> Result<Self> {
        Self::new(self.family, mean, self.scale)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            Family::Bernoulli => {
                if rng.random::<f64>() < self.mean {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                self.mean + self.scale * z
            }
            Family::Poisson => Poisson::new(self.mean)
                .expect("validated poisson mean")
                .sample(rng),
            Family::Exponential => {
                let e: f64 = Exp1.sample(rng);
                self.mean * e
            }
        }
    }
}

/// Kullback-Leibler divergence `KL(a || b)` between two same-family arms,
/// parametrised by their means.
///
/// Bernoulli divergences towards a degenerate `q ∈ {0, 1}` with `p ≠ q`
/// return `f64::INFINITY`.
pub fn kl_divergence(a: &ArmModel, b: &ArmModel) -> Result<f64> {
    if !a.comparable(b) {
        return Err(Error::Domain(format!(
            "KL between {:?}(scale {}) and {:?}(scale {}) is undefined",
            a.family, a.scale, b.family, b.scale
        )));
    }
    Ok(kl_means(a.family, a.mean, b.mean, a.scale))
}

/// KL divergence for two means of the same family; `scale` is the Gaussian σ.
pub fn kl_means(family: Family, p: f64, q: f64, scale: f64) -> f64 {
    match family {
        Family::Bernoulli => kl_bernoulli(p, q),
        Family::Gaussian => (p - q) * (p - q) / (2.0 * scale * scale),
        Family::Poisson => {
            if p == 0.0 {
                q
            } else {
                p * (p / q).ln() + q - p
            }
        }
        Family::Exponential => (q / p).ln() + p / q - 1.0,
    }
}

pub fn kl_bernoulli(p: f64, q: f64) -> f64 {
    fn xlogy(x: f64, y: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            x * (x / y).ln()
        }
    }
    if p == q {
        return 0.0;
    }
    if (q == 0.0 && p > 0.0) || (q == 1.0 && p < 1.0) {
        return f64::INFINITY;
    }
    (xlogy(p, q) + xlogy(1.0 - p, 1.0 - q)).max(0.0)
}

/// A stationary stretch of the environment starting at time `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub start: u64,
    pub arms: Vec<ArmModel>,
}

/// Piecewise-stationary environment over time steps `1..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    horizon: u64,
    phases: Vec<Phase>,
}

impl EnvironmentSpec {
    pub fn new(horizon: u64, phases: Vec<Phase>) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::Argument("horizon must be >= 1".into()));
        }
        let first = phases
            .first()
            .ok_or_else(|| Error::Argument("at least one phase is required".into()))?;
        if first.start != 1 {
            return Err(Error::Argument(format!(
                "first phase must start at t=1, got {}",
                first.start
            )));
        }
        let k = first.arms.len();
        if k < 2 {
            return Err(Error::Argument(format!("need at least 2 arms, got {k}")));
        }
        let family = first.arms[0].family;
        for (i, w) in phases.windows(2).enumerate() {
            if w[1].start <= w[0].start {
                return Err(Error::Argument(format!(
                    "phase {} start {} is not after {}",
                    i + 1,
                    w[1].start,
                    w[0].start
                )));
            }
        }
        for (i, phase) in phases.iter().enumerate() {
            if phase.start > horizon {
                return Err(Error::Argument(format!(
                    "phase {i} starts at {} beyond horizon {horizon}",
                    phase.start
                )));
            }
            if phase.arms.len() != k {
                return Err(Error::Argument(format!(
                    "phase {i} has {} arms, expected {k}",
                    phase.arms.len()
                )));
            }
            if let Some(arm) = phase.arms.iter().find(|a| a.family != family) {
                return Err(Error::Argument(format!(
                    "phase {i} mixes families {:?} and {:?}",
                    family, arm.family
                )));
            }
        }
        Ok(EnvironmentSpec { horizon, phases })
    }

    /// Single-phase environment.
    pub fn stationary(horizon: u64, arms: Vec<ArmModel>) -> Result<Self> {
        Self::new(horizon, vec![Phase { start: 1, arms }])
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn num_arms(&self) -> usize {
        self.phases[0].arms.len()
    }

    pub fn family(&self) -> Family {
        self.phases[0].arms[0].family
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    /// Number of breakpoints Γ_T.
    pub fn num_breakpoints(&self) -> usize {
        self.phases.len() - 1
    }

    /// Largest Gaussian σ over all arms and phases (1.0 for other families).
    pub fn max_scale(&self) -> f64 {
        self.phases
            .iter()
            .flat_map(|p| p.arms.iter().map(|a| a.scale))
            .fold(f64::MIN, f64::max)
    }

    /// Same environment with a different horizon; phases starting after the
    /// new horizon are dropped.
    pub fn with_horizon(&self, horizon: u64) -> Result<Self> {
        let phases = self
            .phases
            .iter()
            .filter(|p| p.start <= horizon.max(1))
            .cloned()
            .collect();
        Self::new(horizon, phases)
    }

    fn check(&self, arm: usize, t: u64) -> Result<()> {
        if t < 1 || t > self.horizon {
            return Err(Error::Argument(format!(
                "time {t} outside [1, {}]",
                self.horizon
            )));
        }
        if arm >= self.num_arms() {
            return Err(Error::Argument(format!(
                "arm {arm} outside [0, {})",
                self.num_arms()
            )));
        }
        Ok(())
    }

    /// Index of the phase active at time `t` (unchecked).
    pub fn phase_index(&self, t: u64) -> usize {
        self.phases.partition_point(|p| p.start <= t) - 1
    }

    pub fn arm_at(&self, arm: usize, t: u64) -> Result<&ArmModel> {
        self.check(arm, t)?;
        Ok(&self.phases[self.phase_index(t)].arms[arm])
    }

    pub fn oracle_mean(&self, arm: usize, t: u64) -> Result<f64> {
        Ok(self.arm_at(arm, t)?.mean)
    }

    /// μ⋆_t, the best mean at time `t`.
    pub fn best_mean(&self, t: u64) -> Result<f64> {
        self.check(0, t)?;
        Ok(self.phases[self.phase_index(t)]
            .arms
            .iter()
            .map(|a| a.mean)
            .fold(f64::MIN, f64::max))
    }

    pub fn sample_reward<R: Rng + ?Sized>(&self, arm: usize, t: u64, rng: &mut R) -> Result<f64> {
        Ok(self.arm_at(arm, t)?.sample(rng))
    }
}
