use rand_distr::{Beta, Distribution, StandardNormal};

use super::{argmax, Forgetting, StepStats};
use crate::envs::Family;
use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::SimRng;

/// Thompson sampling with optional window (SW-TS) or discount (DTS).
///
/// Bernoulli arms use a `Beta(1 + s, 1 + f)` posterior over the effective
/// successes and failures; Gaussian arms with known σ use `Normal(mean,
/// σ²/N)`, and an arm with no effective observation is pulled outright.
#[derive(Debug, Clone)]
pub struct Thompson {
    family: Family,
    sigma: f64,
    stats: StepStats,
}

impl Thompson {
    pub fn new(num_arms: usize, family: Family, sigma: f64, forgetting: Forgetting) -> Result<Self> {
        if !matches!(family, Family::Bernoulli | Family::Gaussian) {
            return Err(Error::Unsupported(format!(
                "thompson sampling is not available for {} arms",
                family.name()
            )));
        }
        Ok(Thompson {
            family,
            sigma,
            stats: StepStats::new(num_arms, forgetting),
        })
    }

    pub fn stats(&self) -> &StepStats {
        &self.stats
    }

    /// Posterior Beta parameters of a Bernoulli arm.
    pub fn beta_parameters(&self, arm: usize) -> (f64, f64) {
        let n = self.stats.count(arm);
        let s = self.stats.sum(arm).clamp(0.0, n);
        (1.0 + s, 1.0 + (n - s).max(0.0))
    }

    fn sample(&self, arm: usize, rng: &mut SimRng) -> f64 {
        match self.family {
            Family::Bernoulli => {
                let (a, b) = self.beta_parameters(arm);
                Beta::new(a, b).expect("positive beta parameters").sample(rng)
            }
            _ => {
                let n = self.stats.count(arm);
                let z: f64 = StandardNormal.sample(rng);
                self.stats.mean(arm) + self.sigma / n.sqrt() * z
            }
        }
    }
}

impl Policy for Thompson {
    fn num_arms(&self) -> usize {
        self.stats.num_arms()
    }

    fn select(&mut self, rng: &mut SimRng) -> Vec<usize> {
        let k = self.stats.num_arms();
        if self.family == Family::Gaussian {
            if let Some(a) = (0..k).find(|&a| self.stats.count(a) <= 0.0) {
                return vec![a];
            }
        }
        let draws: Vec<f64> = (0..k).map(|a| self.sample(a, rng)).collect();
        vec![argmax(&draws)]
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        self.stats.update(arm, reward);
    }
}
