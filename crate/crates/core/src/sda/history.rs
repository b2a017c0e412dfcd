use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
struct Entry {
    round: u64,
    reward: f64,
    /// Cumulative reward of every pull of the arm, up to and including this one.
    cum: f64,
}

/// Reward history of one arm.
///
/// The same buffer backs the three storage modes: unbounded (LB-SDA),
/// capacity-bounded with oldest-first eviction (LB-SDA-LM) and round-window
/// expiry (SW-LB-SDA). Each entry carries the running cumulative sum so that
/// the mean of any suffix ("last block") costs O(1).
#[derive(Debug, Clone, Default)]
pub struct HistoryBuffer {
    entries: VecDeque<Entry>,
    /// Cumulative sum of everything evicted so far.
    base: f64,
    total_pulls: u64,
}

impl HistoryBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Unbounded history holding `rewards`, tagged with round 0.
    pub fn from_rewards(rewards: &[f64]) -> Self {
        let mut h = Self::new();
        for &r in rewards {
            h.push(0, r);
        }
        h
    }

    pub fn push(&mut self, round: u64, reward: f64) {
        let cum = self.entries.back().map_or(self.base, |e| e.cum) + reward;
        self.entries.push_back(Entry { round, reward, cum });
        self.total_pulls += 1;
    }

    /// Appends after evicting the oldest rewards so that at most `capacity`
    /// are stored.
    pub fn push_bounded(&mut self, round: u64, reward: f64, capacity: usize) {
        let capacity = capacity.max(1);
        while self.entries.len() >= capacity {
            self.pop_oldest();
        }
        self.push(round, reward);
    }

    fn pop_oldest(&mut self) {
        if let Some(e) = self.entries.pop_front() {
            self.base = e.cum;
        }
    }

    /// Drops every reward collected before round `first_kept`.
    pub fn expire_before(&mut self, first_kept: u64) {
        while self.entries.front().is_some_and(|e| e.round < first_kept) {
            self.pop_oldest();
        }
    }

    /// Number of stored rewards.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every pull ever made, evicted rewards included.
    pub fn total_pulls(&self) -> u64 {
        self.total_pulls
    }

    /// Sum of every reward ever pushed, evicted ones included.
    pub fn total_sum(&self) -> f64 {
        self.entries.back().map_or(self.base, |e| e.cum)
    }

    /// Sum of the stored rewards.
    pub fn sum(&self) -> f64 {
        self.entries.back().map_or(0.0, |e| e.cum - self.base)
    }

    pub fn mean(&self) -> f64 {
        if self.entries.is_empty() {
            return f64::NAN;
        }
        self.sum() / self.entries.len() as f64
    }

    /// Sum of the `n` most recent stored rewards (`n` is clamped to the
    /// stored length).
    pub fn last_block_sum(&self, n: usize) -> f64 {
        let len = self.entries.len();
        let n = n.min(len);
        if n == 0 {
            return 0.0;
        }
        let end = self.entries[len - 1].cum;
        let start = if n == len {
            self.base
        } else {
            self.entries[len - 1 - n].cum
        };
        end - start
    }

    pub fn last_block_mean(&self, n: usize) -> f64 {
        let n = n.min(self.entries.len());
        if n == 0 {
            return f64::NAN;
        }
        self.last_block_sum(n) / n as f64
    }

    pub fn rewards(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.reward)
    }

    /// Rounds at which the stored rewards were collected.
    pub fn rounds(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.round)
    }
}
