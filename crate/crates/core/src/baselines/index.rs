use super::{argmax, Forgetting, StepStats};
use crate::envs::{kl_means, Family};
use crate::policy::Policy;
use crate::SimRng;

const BISECTION_TOL: f64 = 1e-8;

/// Exploration level `f(t) = ln t + 3 ln ln t`, clamped at 0; below `t = 2`
/// only `ln t` is used.
pub fn klucb_exploration(t: f64) -> f64 {
    if t < 2.0 {
        return t.ln().max(0.0);
    }
    (t.ln() + 3.0 * t.ln().ln()).max(0.0)
}

/// Upper confidence bound `sup{q ≥ mean : count · kl(mean, q) ≤ level}`.
///
/// Gaussian indices use the closed form `mean + σ√(2·level/count)`; the
/// other families are solved by bisection to `1e-8` on `q`.
pub fn klucb_index(mean: f64, count: f64, level: f64, family: Family, sigma: f64) -> f64 {
    if level <= 0.0 {
        return mean;
    }
    if count <= 0.0 {
        return f64::INFINITY;
    }
    let budget = level / count;
    match family {
        Family::Gaussian => mean + sigma * (2.0 * budget).sqrt(),
        Family::Bernoulli => {
            let mean = mean.clamp(0.0, 1.0);
            if mean >= 1.0 {
                return 1.0;
            }
            bisect(mean, 1.0, |q| kl_means(family, mean, q, 1.0) <= budget)
        }
        Family::Poisson | Family::Exponential => {
            let floor = if family == Family::Exponential { 1e-12 } else { 0.0 };
            let mean = mean.max(floor);
            let ok = |q: f64| kl_means(family, mean, q, 1.0) <= budget;
            let mut hi = 2.0 * mean.max(1.0);
            while ok(hi) {
                hi *= 2.0;
            }
            bisect(mean, hi, ok)
        }
    }
}

/// Largest `q` in `[lo, hi]` with `ok(q)`, assuming `ok(lo)` and a single
/// switch from true to false.
fn bisect(mut lo: f64, mut hi: f64, ok: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndexKind {
    /// `mean + B√(2 ln t / N)`.
    Ucb1 { bound: f64 },
    /// Width `B√(ξ ln min(t,τ) / N)` with a window, `2B√(ξ ln n_t / N)` with
    /// discounting (`n_t` the total discounted count).
    Ucb { bound: f64, xi: f64 },
    KlUcb { family: Family, sigma: f64 },
}

/// Optimistic index policy over [`StepStats`]. Every arm is pulled once
/// first; an arm whose effective count is zero has an infinite index.
#[derive(Debug, Clone)]
pub struct IndexPolicy {
    kind: IndexKind,
    stats: StepStats,
}

impl IndexPolicy {
    pub fn new(num_arms: usize, kind: IndexKind, forgetting: Forgetting) -> Self {
        IndexPolicy {
            kind,
            stats: StepStats::new(num_arms, forgetting),
        }
    }

    pub fn stats(&self) -> &StepStats {
        &self.stats
    }

    /// Time scale entering the exploration term.
    fn horizon_term(&self) -> f64 {
        let t = self.stats.steps() as f64;
        match self.stats.forgetting() {
            Forgetting::None => t,
            Forgetting::Window(tau) => t.min(tau as f64),
            Forgetting::Discount(_) => self.stats.total_count(),
        }
    }

    pub fn indices(&self) -> Vec<f64> {
        let t = self.horizon_term();
        (0..self.stats.num_arms())
            .map(|k| {
                let n = self.stats.count(k);
                if n <= 0.0 {
                    return f64::INFINITY;
                }
                let mean = self.stats.mean(k);
                match self.kind {
                    IndexKind::Ucb1 { bound } => mean + bound * (2.0 * t.ln().max(0.0) / n).sqrt(),
                    IndexKind::Ucb { bound, xi } => {
                        let c = match self.stats.forgetting() {
                            Forgetting::Discount(_) => 2.0,
                            _ => 1.0,
                        };
                        mean + c * bound * (xi * t.ln().max(0.0) / n).sqrt()
                    }
                    IndexKind::KlUcb { family, sigma } => {
                        klucb_index(mean, n, klucb_exploration(t), family, sigma)
                    }
                }
            })
            .collect()
    }
}

impl Policy for IndexPolicy {
    fn num_arms(&self) -> usize {
        self.stats.num_arms()
    }

    fn select(&mut self, _rng: &mut SimRng) -> Vec<usize> {
        if let Some(k) = (0..self.stats.num_arms()).find(|&k| self.stats.total_pulls(k) == 0) {
            return vec![k];
        }
        vec![argmax(&self.indices())]
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        self.stats.update(arm, reward);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bernoulli_index_closed_form() {
        let q = klucb_index(0.0, 1.0, 1.0, Family::Bernoulli, 1.0);
        assert_abs_diff_eq!(q, 1.0 - (-1.0f64).exp(), epsilon = 1e-6);
        assert_eq!(klucb_index(1.0, 7.0, 3.0, Family::Bernoulli, 1.0), 1.0);
    }

    #[test]
    fn gaussian_index_closed_form() {
        assert_abs_diff_eq!(klucb_index(0.5, 4.0, 2.0, Family::Gaussian, 0.5), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn poisson_and_exponential_indices_solve_the_constraint() {
        for family in [Family::Poisson, Family::Exponential] {
            let (mean, n, f) = (1.3, 5.0, 2.0);
            let q = klucb_index(mean, n, f, family, 1.0);
            assert!(q > mean);
            assert_abs_diff_eq!(n * kl_means(family, mean, q, 1.0), f, epsilon = 1e-6);
        }
    }

    #[test]
    fn exploration_level() {
        assert_eq!(klucb_exploration(1.0), 0.0);
        assert_eq!(klucb_exploration(2.0), 0.0);
        let t = 1000.0f64;
        assert_abs_diff_eq!(klucb_exploration(t), t.ln() + 3.0 * t.ln().ln(), epsilon = 1e-12);
    }

    #[test]
    fn index_monotonicity() {
        for family in [Family::Bernoulli, Family::Gaussian, Family::Poisson, Family::Exponential] {
            let mean = 0.3;
            let mut prev = mean;
            for t in [3.0, 10.0, 100.0, 1e4] {
                let q = klucb_index(mean, 10.0, klucb_exploration(t), family, 0.5);
                assert!(q >= prev - 1e-9, "{family:?} t={t}");
                prev = q;
            }
            let mut prev = f64::INFINITY;
            for n in [1.0, 2.0, 10.0, 100.0] {
                let q = klucb_index(mean, n, 3.0, family, 0.5);
                assert!(q <= prev + 1e-9 && q >= mean);
                prev = q;
            }
        }
    }

    #[test]
    fn initial_pulls_then_index() {
        let mut p = IndexPolicy::new(3, IndexKind::Ucb1 { bound: 1.0 }, Forgetting::None);
        let mut rng = crate::sim_rng(0);
        for k in 0..3 {
            assert_eq!(p.select(&mut rng), vec![k]);
            p.observe(k, if k == 2 { 1.0 } else { 0.0 });
        }
        assert_eq!(p.select(&mut rng), vec![2]);
    }

    #[test]
    fn argmax_shift_invariance() {
        let mut p = IndexPolicy::new(3, IndexKind::KlUcb { family: Family::Gaussian, sigma: 1.0 }, Forgetting::None);
        let mut q = p.clone();
        for (k, r) in [(0, 0.2), (1, 0.9), (2, 0.5), (1, 0.1), (0, 0.4)] {
            p.observe(k, r);
            q.observe(k, r + 10.0);
        }
        assert_eq!(argmax(&p.indices()), argmax(&q.indices()));
    }

    #[test]
    fn windowed_arm_reenters_after_expiry() {
        let mut p = IndexPolicy::new(2, IndexKind::Ucb { bound: 1.0, xi: 0.6 }, Forgetting::Window(3));
        let mut rng = crate::sim_rng(0);
        p.observe(1, 0.0);
        for _ in 0..3 {
            p.observe(0, 1.0);
        }
        // arm 1 fell out of the window: infinite index
        assert_eq!(p.select(&mut rng), vec![1]);
    }
}
