//! Step-based competitor policies: UCB1, kl-UCB, Thompson sampling, their
//! sliding-window and discounted variants, and EXP3S.

use std::collections::VecDeque;

pub mod exp3s;
pub mod index;
pub mod thompson;
pub mod tuning;

pub use exp3s::Exp3s;
pub use index::{klucb_exploration, klucb_index, IndexKind, IndexPolicy};
pub use thompson::Thompson;

/// Default exploration constant ξ of SW-UCB and D-UCB.
pub const DEFAULT_XI: f64 = 0.6;

/// How past observations are forgotten.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forgetting {
    None,
    /// Keep the last `τ` time steps.
    Window(u64),
    /// Multiply every statistic by `γ` at each step.
    Discount(f64),
}

/// Per-arm counts and reward sums under a forgetting rule, updated one pull
/// per time step.
#[derive(Debug, Clone)]
pub struct StepStats {
    forgetting: Forgetting,
    counts: Vec<f64>,
    sums: Vec<f64>,
    pulls: Vec<u64>,
    window: VecDeque<(usize, f64)>,
    steps: u64,
}

impl StepStats {
    pub fn new(num_arms: usize, forgetting: Forgetting) -> Self {
        StepStats {
            forgetting,
            counts: vec![0.0; num_arms],
            sums: vec![0.0; num_arms],
            pulls: vec![0; num_arms],
            window: VecDeque::new(),
            steps: 0,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.counts.len()
    }

    pub fn forgetting(&self) -> Forgetting {
        self.forgetting
    }

    /// Time steps observed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Effective count of `arm` (plain, windowed or discounted).
    pub fn count(&self, arm: usize) -> f64 {
        self.counts[arm]
    }

    pub fn sum(&self, arm: usize) -> f64 {
        self.sums[arm]
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.sums[arm] / self.counts[arm]
    }

    /// Pulls of `arm` since the start, ignoring forgetting.
    pub fn total_pulls(&self, arm: usize) -> u64 {
        self.pulls[arm]
    }

    /// Sum of the effective counts over arms.
    pub fn total_count(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn update(&mut self, arm: usize, reward: f64) {
        self.steps += 1;
        self.pulls[arm] += 1;
        match self.forgetting {
            Forgetting::None => {
                self.counts[arm] += 1.0;
                self.sums[arm] += reward;
            }
            Forgetting::Discount(g) => {
                self.counts.iter_mut().for_each(|c| *c *= g);
                self.sums.iter_mut().for_each(|s| *s *= g);
                self.counts[arm] += 1.0;
                self.sums[arm] += reward;
            }
            Forgetting::Window(tau) => {
                self.window.push_back((arm, reward));
                self.counts[arm] += 1.0;
                self.sums[arm] += reward;
                if self.window.len() as u64 > tau {
                    let (old, r) = self.window.pop_front().expect("non-empty window");
                    self.counts[old] -= 1.0;
                    if self.counts[old] == 0.0 {
                        self.sums[old] = 0.0;
                    } else {
                        self.sums[old] -= r;
                    }
                }
                // wipe accumulated rounding once per window length
                if tau > 0 && self.steps.is_multiple_of(tau) {
                    self.resum_window();
                }
            }
        }
    }

    fn resum_window(&mut self) {
        self.sums.iter_mut().for_each(|s| *s = 0.0);
        for &(a, r) in &self.window {
            self.sums[a] += r;
        }
    }

    /// Arm rewards currently inside the window (in pull order).
    pub fn window_rewards(&self, arm: usize) -> impl Iterator<Item = f64> + '_ {
        self.window.iter().filter(move |e| e.0 == arm).map(|e| e.1)
    }
}

/// Index of the first maximum; NaN entries are never selected unless all are
/// NaN.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] || values[best].is_nan() {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn discount_one_step_decay() {
        let mut s = StepStats::new(2, Forgetting::Discount(0.5));
        s.update(0, 1.0);
        s.update(1, 0.0);
        assert_eq!(s.count(0), 0.5);
        assert_eq!(s.sum(0), 0.5);
    }

    #[test]
    fn window_expiry() {
        let mut s = StepStats::new(2, Forgetting::Window(2));
        s.update(0, 1.0);
        s.update(0, 1.0);
        s.update(1, 0.0);
        assert_eq!(s.count(0), 1.0);
        assert_eq!(s.count(1), 1.0);
    }

    #[test]
    fn discounted_counts_geometric_identity() {
        let g = 0.997;
        let mut s = StepStats::new(3, Forgetting::Discount(g));
        for t in 1..=10_000u64 {
            s.update((t * 7 % 3) as usize, 0.5);
            let expected = (1.0 - g.powi(t as i32)) / (1.0 - g);
            assert!((s.total_count() - expected).abs() < 1e-9, "t = {t}");
        }
    }

    proptest! {
        #[test]
        fn window_matches_replay(
            pulls in prop::collection::vec((0usize..3, 0.0f64..1.0), 1..200),
            tau in 1u64..40,
        ) {
            let mut s = StepStats::new(3, Forgetting::Window(tau));
            for &(a, r) in &pulls {
                s.update(a, r);
            }
            let start = pulls.len().saturating_sub(tau as usize);
            for arm in 0..3 {
                let recent: Vec<f64> = pulls[start..].iter().filter(|p| p.0 == arm).map(|p| p.1).collect();
                prop_assert_eq!(s.count(arm), recent.len() as f64);
                prop_assert!((s.sum(arm) - recent.iter().sum::<f64>()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn argmax_first_wins() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[f64::NAN, 0.0]), 1);
        assert_eq!(argmax(&[0.0, f64::INFINITY]), 1);
    }
}
