use rand::Rng;

use super::{argmax_count_then_sum, forced_exploration_level, HistoryBuffer};
use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::verify::trajectory::{RoundRecord, TrajectoryKind};
use crate::SimRng;

/// SW-LB-SDA: last-block dueling restricted to the rewards of the last `τ`
/// rounds.
///
/// After round `r` the window holds the rewards of rounds `r-τ+1 ..= r`, so
/// `N_k^τ` is the number of pulls of `k` during the last `τ` completed rounds.
/// The leader changes only through [`sw_leader_update`], and long-ignored
/// arms are forced back in through [`diversity_flags`].
#[derive(Debug, Clone)]
pub struct SwLbSda {
    arms: Vec<HistoryBuffer>,
    tau: u64,
    round: u64,
    leader: Option<usize>,
    /// Completed-round count at which the current leader took over.
    leader_since: u64,
    /// Last round each arm was pulled in (0 = never).
    last_pulled: Vec<u64>,
    last: Vec<usize>,
    flags: Vec<bool>,
}

/// `⌈(K-1)(ln τ)²⌉`, the number of rounds the diversity conditions must hold.
pub fn diversity_window(num_arms: usize, tau: u64) -> u64 {
    let l = (tau as f64).ln();
    ((num_arms as f64 - 1.0) * l * l).ceil() as u64
}

/// Leader for the next round after `completed` rounds.
///
/// `counts` and `sums` are windowed and already reflect the pulls of the round
/// just played (`pulled`) and the expiry of old rounds. With
/// `m = min(completed, τ)`: if the incumbent holds fewer than `m/(2K)`
/// windowed samples the argmax runs over every arm, otherwise only over the
/// incumbent and the arms pulled this round holding at least `m/K` samples.
/// Ties go to the larger windowed sum, then the incumbent, then a uniform draw.
pub fn sw_leader_update<R: Rng + ?Sized>(
    counts: &[u64],
    sums: &[f64],
    incumbent: Option<usize>,
    pulled: &[usize],
    completed: u64,
    tau: u64,
    rng: &mut R,
) -> usize {
    let k = counts.len() as f64;
    let m = completed.min(tau) as f64;
    match incumbent {
        Some(inc) if counts[inc] as f64 >= m / (2.0 * k) => {
            let candidates = pulled
                .iter()
                .copied()
                .filter(|&a| a != inc && counts[a] as f64 >= m / k)
                .chain(std::iter::once(inc));
            argmax_count_then_sum(candidates, counts, sums, Some(inc), rng)
        }
        _ => argmax_count_then_sum(0..counts.len(), counts, sums, incumbent, rng),
    }
}

/// Diversity flags `D_k^τ` at the decision following `completed` rounds.
///
/// `D_k = 1` iff over the last `W` completed rounds the same arm `ℓ ≠ k` was
/// leader, neither `ℓ` nor `k` was pulled, and `N_k^τ ≤ (ln τ)²`.
pub fn diversity_flags(
    completed: u64,
    leader: usize,
    leader_since: u64,
    last_pulled: &[u64],
    windowed_counts: &[u64],
    tau: u64,
) -> Vec<bool> {
    let k = windowed_counts.len();
    let w = diversity_window(k, tau);
    let mut flags = vec![false; k];
    if completed < w {
        return flags;
    }
    let cutoff = completed - w;
    if leader_since > cutoff || last_pulled[leader] > cutoff {
        return flags;
    }
    let l = (tau as f64).ln();
    for (arm, flag) in flags.iter_mut().enumerate() {
        *flag = arm != leader
            && last_pulled[arm] <= cutoff
            && windowed_counts[arm] as f64 <= l * l;
    }
    flags
}

impl SwLbSda {
    pub fn new(num_arms: usize, tau: u64) -> Result<Self> {
        if num_arms < 2 {
            return Err(Error::Argument("SW-LB-SDA needs at least 2 arms".into()));
        }
        if tau < num_arms as u64 {
            return Err(Error::Argument(format!(
                "window tau = {tau} must be >= number of arms {num_arms}"
            )));
        }
        Ok(SwLbSda {
            arms: vec![HistoryBuffer::new(); num_arms],
            tau,
            round: 0,
            leader: None,
            leader_since: 0,
            last_pulled: vec![0; num_arms],
            last: Vec::new(),
            flags: vec![false; num_arms],
        })
    }

    /// State after `round` completed rounds where each arm's in-window
    /// rewards are `windows[k]`, the leader is `leader` and every arm was
    /// pulled in the last round.
    pub fn from_windows(windows: &[Vec<f64>], tau: u64, round: u64, leader: usize) -> Result<Self> {
        let mut p = Self::new(windows.len(), tau)?;
        for (buf, rewards) in p.arms.iter_mut().zip(windows) {
            for &r in rewards {
                buf.push(round, r);
            }
        }
        p.round = round;
        p.leader = Some(leader);
        p.leader_since = round;
        p.last_pulled = vec![round; windows.len()];
        Ok(p)
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn leader(&self) -> Option<usize> {
        self.leader
    }

    pub fn windowed_counts(&self) -> Vec<u64> {
        self.arms.iter().map(|a| a.len() as u64).collect()
    }

    pub fn total_counts(&self) -> Vec<u64> {
        self.arms.iter().map(HistoryBuffer::total_pulls).collect()
    }

    pub fn histories(&self) -> &[HistoryBuffer] {
        &self.arms
    }

    /// Diversity flags used by the last `select` call.
    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    /// Whether challenger `k` is pulled against `leader`, ignoring diversity
    /// flags.
    pub fn challenger_wins(&self, k: usize, leader: usize) -> bool {
        let (ch, ld) = (&self.arms[k], &self.arms[leader]);
        if ch.len() as f64 <= forced_exploration_level(self.tau) {
            return true;
        }
        let block = ch.len().min(ld.len());
        block == 0 || ch.mean() >= ld.last_block_mean(block)
    }

    pub fn duel_set(&self, leader: usize, flags: &[bool]) -> Vec<usize> {
        let winners: Vec<usize> = (0..self.arms.len())
            .filter(|&k| k != leader && (flags[k] || self.challenger_wins(k, leader)))
            .collect();
        if winners.is_empty() {
            vec![leader]
        } else {
            winners
        }
    }
}

impl Policy for SwLbSda {
    fn num_arms(&self) -> usize {
        self.arms.len()
    }

    fn select(&mut self, _rng: &mut SimRng) -> Vec<usize> {
        let set = match self.leader {
            None => (0..self.arms.len()).collect(),
            Some(leader) => {
                self.flags = diversity_flags(
                    self.round,
                    leader,
                    self.leader_since,
                    &self.last_pulled,
                    &self.windowed_counts(),
                    self.tau,
                );
                self.duel_set(leader, &self.flags)
            }
        };
        self.last = set.clone();
        set
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        let playing = self.round + 1;
        self.arms[arm].push(playing, reward);
        self.last_pulled[arm] = playing;
    }

    fn end_round(&mut self, rng: &mut SimRng) {
        self.round += 1;
        if self.round >= self.tau {
            let first_kept = self.round + 1 - self.tau;
            for a in &mut self.arms {
                a.expire_before(first_kept);
            }
        }
        let counts = self.windowed_counts();
        let sums: Vec<f64> = self.arms.iter().map(HistoryBuffer::sum).collect();
        let next = sw_leader_update(&counts, &sums, self.leader, &self.last, self.round, self.tau, rng);
        if self.leader != Some(next) {
            self.leader_since = self.round;
        }
        self.leader = Some(next);
    }

    fn stored_lengths(&self) -> Option<Vec<usize>> {
        Some(self.arms.iter().map(HistoryBuffer::len).collect())
    }

    fn trajectory_kind(&self) -> Option<TrajectoryKind> {
        Some(TrajectoryKind::SwLbSda { tau: self.tau })
    }

    fn round_record(&self) -> Option<RoundRecord> {
        let leader = self.leader?;
        if self.round == 0 {
            return None;
        }
        Some(RoundRecord {
            round: self.round,
            leader,
            counts: self.windowed_counts(),
            stored: self.arms.iter().map(HistoryBuffer::len).collect(),
            capacity: None,
            pulled: self.last.clone(),
        })
    }
}
