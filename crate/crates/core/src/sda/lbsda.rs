use super::{forced_exploration_level, lbsda_leader, HistoryBuffer, MemorySchedule};
use crate::policy::Policy;
use crate::verify::trajectory::{RoundRecord, TrajectoryKind};
use crate::SimRng;

/// LB-SDA, and LB-SDA-LM when a [`MemorySchedule`] is set.
///
/// With limited memory the duel uses stored rewards only: the challenger's
/// index is the mean of its stored history and the leader's block is its last
/// `min(stored_k, stored_ℓ)` stored rewards. Pulling a saturated arm evicts
/// its oldest stored reward. Leader election always uses total counts and
/// total reward sums.
#[derive(Debug, Clone)]
pub struct LbSda {
    arms: Vec<HistoryBuffer>,
    memory: Option<MemorySchedule>,
    /// Completed rounds.
    round: u64,
    leader: Option<usize>,
    last: Vec<usize>,
}

impl LbSda {
    pub fn new(num_arms: usize) -> Self {
        LbSda {
            arms: vec![HistoryBuffer::new(); num_arms],
            memory: None,
            round: 0,
            leader: None,
            last: Vec::new(),
        }
    }

    pub fn with_memory(num_arms: usize, schedule: MemorySchedule) -> Self {
        LbSda {
            memory: Some(schedule),
            ..Self::new(num_arms)
        }
    }

    /// State after `round` completed rounds with the given (unbounded)
    /// histories.
    pub fn from_histories(histories: &[Vec<f64>], round: u64) -> Self {
        Self::from_buffers(
            histories.iter().map(|h| HistoryBuffer::from_rewards(h)).collect(),
            round,
            None,
        )
    }

    pub fn from_buffers(arms: Vec<HistoryBuffer>, round: u64, memory: Option<MemorySchedule>) -> Self {
        LbSda {
            arms,
            memory,
            round,
            leader: None,
            last: Vec::new(),
        }
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn leader(&self) -> Option<usize> {
        self.leader
    }

    pub fn histories(&self) -> &[HistoryBuffer] {
        &self.arms
    }

    pub fn memory(&self) -> Option<&MemorySchedule> {
        self.memory.as_ref()
    }

    pub fn counts(&self) -> Vec<u64> {
        self.arms.iter().map(HistoryBuffer::total_pulls).collect()
    }

    /// Storage limit applying to the round being played next.
    pub fn capacity(&self) -> Option<usize> {
        self.memory.map(|m| m.capacity(self.round + 1))
    }

    /// Whether challenger `k` is pulled against `leader` at the current round.
    pub fn challenger_wins(&self, k: usize, leader: usize) -> bool {
        let (ch, ld) = (&self.arms[k], &self.arms[leader]);
        if ch.total_pulls() as f64 <= forced_exploration_level(self.round) {
            return true;
        }
        let block = ch.len().min(ld.len());
        if block == 0 {
            return true;
        }
        let challenger = ch.mean();
        let leader_block = ld.last_block_mean(block);
        if ch.total_pulls() == ld.total_pulls() {
            // Equal counts: the leader already won the sum tie-break, so an
            // exact tie stays with the leader.
            challenger > leader_block
        } else {
            challenger >= leader_block
        }
    }

    /// Pull set for the next round given the elected leader.
    pub fn duel_set(&self, leader: usize) -> Vec<usize> {
        let winners: Vec<usize> = (0..self.arms.len())
            .filter(|&k| k != leader && self.challenger_wins(k, leader))
            .collect();
        if winners.is_empty() {
            vec![leader]
        } else {
            winners
        }
    }
}

impl Policy for LbSda {
    fn num_arms(&self) -> usize {
        self.arms.len()
    }

    fn select(&mut self, rng: &mut SimRng) -> Vec<usize> {
        let set = if self.round == 0 {
            self.leader = None;
            (0..self.arms.len()).collect()
        } else {
            let counts = self.counts();
            let sums: Vec<f64> = self.arms.iter().map(HistoryBuffer::total_sum).collect();
            let leader = lbsda_leader(&counts, &sums, rng).expect("at least two arms");
            self.leader = Some(leader);
            self.duel_set(leader)
        };
        self.last = set.clone();
        set
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        let playing = self.round + 1;
        match self.memory {
            Some(m) => self.arms[arm].push_bounded(playing, reward, m.capacity(playing)),
            None => self.arms[arm].push(playing, reward),
        }
    }

    fn end_round(&mut self, _rng: &mut SimRng) {
        self.round += 1;
    }

    fn stored_lengths(&self) -> Option<Vec<usize>> {
        Some(self.arms.iter().map(HistoryBuffer::len).collect())
    }

    fn trajectory_kind(&self) -> Option<TrajectoryKind> {
        Some(match self.memory {
            Some(_) => TrajectoryKind::LbSdaLm,
            None => TrajectoryKind::LbSda,
        })
    }

    fn round_record(&self) -> Option<RoundRecord> {
        let leader = self.leader?;
        Some(RoundRecord {
            round: self.round,
            leader,
            counts: self.counts(),
            stored: self.arms.iter().map(HistoryBuffer::len).collect(),
            capacity: self.memory.map(|m| m.capacity(self.round)),
            pulled: self.last.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LATE: u64 = 100; // √(ln 100) ≈ 2.15 < 3

    #[test]
    fn round_one_pulls_everything() {
        let mut p = LbSda::new(4);
        let mut rng = crate::sim_rng(0);
        assert_eq!(p.select(&mut rng), vec![0, 1, 2, 3]);
        assert!(p.round_record().is_none());
    }

    #[test]
    fn forced_exploration_at_large_round() {
        let p = LbSda::from_histories(&[vec![1.0; 20], vec![0.0; 3]], 1_000_000);
        assert!(p.challenger_wins(1, 0));
        let p = LbSda::from_histories(&[vec![1.0; 20], vec![0.0; 4]], 1_000_000);
        assert!(!p.challenger_wins(1, 0));
    }

    #[test]
    fn last_block_duel() {
        let p = LbSda::from_histories(&[vec![0.0, 0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0]], LATE);
        // challenger mean 1.0 vs leader last-3 mean 1/3
        assert_eq!(p.duel_set(0), vec![1]);

        let p = LbSda::from_histories(&[vec![0.0, 0.0, 0.0, 1.0], vec![1.0, 1.0]], 10_000);
        // √(ln 10^4) ≈ 3.03 ≥ 2: forced
        assert_eq!(p.duel_set(0), vec![1]);

        let p = LbSda::from_histories(&[vec![0.0, 0.0, 0.0, 1.0], vec![0.0, 0.0]], 20);
        // √(ln 20) ≈ 1.73 < 2 and 0.0 < 0.5: the leader wins
        assert_eq!(p.duel_set(0), vec![0]);
        let p = LbSda::from_histories(&[vec![0.0, 0.0, 0.0, 1.0], vec![1.0, 1.0]], 20);
        assert_eq!(p.duel_set(0), vec![1]);
    }

    #[test]
    fn equal_block_means_favour_challenger() {
        let p = LbSda::from_histories(&[vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0]], LATE);
        // 1/3 vs last-3 of leader = 1/3
        assert_eq!(p.duel_set(0), vec![1]);
    }

    #[test]
    fn equal_counts_tie_stays_with_leader() {
        let p = LbSda::from_histories(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]], LATE);
        assert_eq!(p.duel_set(0), vec![0]);
        let p = LbSda::from_histories(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]], LATE);
        assert_eq!(p.duel_set(0), vec![1]);
    }

    #[test]
    fn limited_memory_both_saturated() {
        let mut leader = HistoryBuffer::new();
        for r in [1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0] {
            leader.push_bounded(0, r, 4);
        }
        let mut challenger = HistoryBuffer::new();
        for r in [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0] {
            challenger.push_bounded(0, r, 4);
        }
        assert_eq!(challenger.total_pulls(), 9);
        // leader needs more total pulls than the challenger
        for _ in 0..4 {
            leader.push_bounded(0, 0.0, 4);
            leader.push_bounded(0, 1.0, 4);
        }
        let p = LbSda::from_buffers(vec![leader, challenger], LATE, Some(MemorySchedule::additive(4)));
        // 1.0 vs 0.5 over both full stored histories
        assert!(p.challenger_wins(1, 0));
    }

    #[test]
    fn limited_memory_eviction_on_pull() {
        let mut p = LbSda::with_memory(2, MemorySchedule::max_form(3, 0.0));
        let mut rng = crate::sim_rng(9);
        for _ in 0..50 {
            let set = p.select(&mut rng);
            for a in set {
                p.observe(a, 1.0);
            }
            p.end_round(&mut rng);
            let stored = p.stored_lengths().unwrap();
            assert!(stored.iter().all(|&s| s <= 3));
        }
        assert!(p.counts().iter().sum::<u64>() >= 50);
    }
}
