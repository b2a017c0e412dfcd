use std::f64::consts::E;

use rand::Rng;

use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::SimRng;

const RENORMALIZE_ABOVE: f64 = 1e100;

/// EXP3 with weight sharing.
///
/// `p_k = (1-γ) w_k / Σw + γ/K`; after pulling `k` the gain `x/p_k` updates
/// `w_k ← w_k exp(γ x̂ / K)` and every weight then receives `(eα/K) Σw`, with
/// `Σw` taken before the exponential update. Rewards are divided by `scale`
/// (when set) and clamped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Exp3s {
    weights: Vec<f64>,
    alpha: f64,
    gamma: f64,
    scale: Option<f64>,
    probs: Vec<f64>,
    clamped: u64,
}

impl Exp3s {
    pub fn new(num_arms: usize, alpha: f64, gamma: f64, scale: Option<f64>) -> Result<Self> {
        if num_arms == 0 {
            return Err(Error::Argument("EXP3S needs at least one arm".into()));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Argument(format!("EXP3S gamma = {gamma} outside (0, 1]")));
        }
        if !(alpha >= 0.0) {
            return Err(Error::Argument(format!("EXP3S alpha = {alpha} must be >= 0")));
        }
        let mut p = Exp3s {
            weights: vec![1.0; num_arms],
            alpha,
            gamma,
            scale,
            probs: Vec::new(),
            clamped: 0,
        };
        p.refresh();
        Ok(p)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Current sampling distribution.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn refresh(&mut self) {
        let k = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        self.probs = self
            .weights
            .iter()
            .map(|w| (1.0 - self.gamma) * w / total + self.gamma / k)
            .collect();
    }

    /// Applies the update for a pull of `arm` with reward in `[0, 1]`.
    pub fn update(&mut self, arm: usize, reward: f64) {
        let k = self.weights.len() as f64;
        let gain = reward / self.probs[arm];
        let share = E * self.alpha / k * self.weights.iter().sum::<f64>();
        self.weights[arm] *= (self.gamma * gain / k).exp();
        self.weights.iter_mut().for_each(|w| *w += share);
        let total: f64 = self.weights.iter().sum();
        if total > RENORMALIZE_ABOVE {
            // losing arms may underflow; keep every weight positive
            self.weights.iter_mut().for_each(|w| *w = (*w / total).max(f64::MIN_POSITIVE));
        }
        self.refresh();
    }
}

impl Policy for Exp3s {
    fn num_arms(&self) -> usize {
        self.weights.len()
    }

    fn select(&mut self, rng: &mut SimRng) -> Vec<usize> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return vec![k];
            }
        }
        vec![self.probs.len() - 1]
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        let mut x = match self.scale {
            Some(s) => reward / s,
            None => reward,
        };
        if !(0.0..=1.0).contains(&x) {
            self.clamped += 1;
            x = x.clamp(0.0, 1.0);
        }
        self.update(arm, x);
    }

    fn clamp_count(&self) -> u64 {
        self.clamped
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn full_exploration_is_uniform() {
        let p = Exp3s::new(4, 0.0, 1.0, None).unwrap();
        assert!(p.probabilities().iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn exp3_update_by_hand() {
        let mut p = Exp3s::new(2, 0.0, 0.5, None).unwrap();
        assert_eq!(p.probabilities()[0], 0.5);
        p.update(0, 1.0);
        assert_abs_diff_eq!(p.weights()[0], 0.5f64.exp(), epsilon = 1e-15);
        assert_eq!(p.weights()[1], 1.0);
    }

    #[test]
    fn weight_sharing_uses_old_total() {
        let mut p = Exp3s::new(2, 0.1, 0.5, None).unwrap();
        p.update(0, 0.0);
        // no gain: each weight becomes 1 + (e·0.1/2)·2
        assert_abs_diff_eq!(p.weights()[0], 1.0 + E * 0.1, epsilon = 1e-15);
    }

    #[test]
    fn renormalization_keeps_probabilities() {
        let mut p = Exp3s::new(3, 0.0, 0.9, None).unwrap();
        let mut rng = crate::sim_rng(2);
        for _ in 0..5000 {
            let a = p.select(&mut rng)[0];
            p.observe(a, if a == 0 { 1.0 } else { 0.0 });
            assert!(p.weights().iter().all(|w| w.is_finite() && *w > 0.0));
            let s: f64 = p.probabilities().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clamps_out_of_range_rewards() {
        let mut p = Exp3s::new(2, 0.0, 0.5, Some(2.0)).unwrap();
        p.observe(0, 1.0);
        assert_eq!(p.clamp_count(), 0);
        p.observe(0, 3.0);
        p.observe(1, -0.5);
        assert_eq!(p.clamp_count(), 2);
    }
}
