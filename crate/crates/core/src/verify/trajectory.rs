//! Round logs of the dueling policies and the checkers that audit them.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One decision of a round-based policy.
///
/// `round` is the number of completed rounds when the decision was taken;
/// `counts` are the pull counts at that point (windowed for SW-LB-SDA),
/// `leader` the leader used for the duels and `pulled` the arms selected for
/// round `round + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub leader: usize,
    pub counts: Vec<u64>,
    pub stored: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<usize>,
    pub pulled: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum TrajectoryKind {
    LbSda,
    LbSdaLm,
    SwLbSda { tau: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub num_arms: usize,
    pub rounds: Vec<RoundRecord>,
}

impl Trajectory {
    pub fn new(kind: TrajectoryKind, num_arms: usize) -> Self {
        Trajectory {
            kind,
            num_arms,
            rounds: Vec::new(),
        }
    }

    /// Newline-delimited export, one round per line.
    pub fn write_ndjson(&self, mut out: impl Write) -> std::io::Result<()> {
        for r in &self.rounds {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn export(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_ndjson(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub round: u64,
    pub message: String,
}

/// Outcome of a trajectory audit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckReport {
    pub rounds_checked: u64,
    pub violations: u64,
    pub first: Option<Violation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, round: u64, message: String) {
        self.violations += 1;
        if self.first.is_none() {
            self.first = Some(Violation { round, message });
        }
    }

    pub fn merge(&mut self, other: &CheckReport) {
        self.rounds_checked += other.rounds_checked;
        self.violations += other.violations;
        if self.first.is_none() {
            self.first = other.first.clone();
        }
    }
}

/// Streaming auditor for a single trajectory, fed one record at a time.
pub trait RoundChecker {
    fn push(&mut self, record: &RoundRecord);
    fn report(&self) -> &CheckReport;
}

/// Leader-count identity of LB-SDA: with
/// `W_r = 1 + #{s < r : A_{s+1} = {ℓ(s)}}`, every round satisfies
/// `W_r = N_{ℓ(r)}(r) ≥ r/K`.
#[derive(Debug, Clone)]
pub struct LeaderCountChecker {
    num_arms: usize,
    w: u64,
    report: CheckReport,
}

impl LeaderCountChecker {
    pub fn new(num_arms: usize) -> Result<Self> {
        if num_arms < 2 {
            return Err(Error::Argument(format!(
                "leader-count check needs K >= 2, got {num_arms}"
            )));
        }
        Ok(LeaderCountChecker {
            num_arms,
            w: 1,
            report: CheckReport::default(),
        })
    }
}

impl RoundChecker for LeaderCountChecker {
    fn push(&mut self, rec: &RoundRecord) {
        let n_leader = rec.counts[rec.leader];
        self.report.rounds_checked += 1;
        if self.w != n_leader {
            self.report.record(
                rec.round,
                format!("W_r = {} but N_leader = {n_leader}", self.w),
            );
        } else if n_leader * (self.num_arms as u64) < rec.round {
            self.report.record(
                rec.round,
                format!("N_leader = {n_leader} < r/K = {}/{}", rec.round, self.num_arms),
            );
        }
        if rec.pulled.len() == 1 && rec.pulled[0] == rec.leader {
            self.w += 1;
        }
    }

    fn report(&self) -> &CheckReport {
        &self.report
    }
}

/// Sliding-window leader bound `N^τ_ℓ(r) ≥ min(r, τ)/(2K)`, checked from
/// round `2K` on.
#[derive(Debug, Clone)]
pub struct SwLeaderChecker {
    num_arms: usize,
    tau: u64,
    report: CheckReport,
}

impl SwLeaderChecker {
    pub fn new(num_arms: usize, tau: u64) -> Self {
        SwLeaderChecker {
            num_arms,
            tau,
            report: CheckReport::default(),
        }
    }

    /// First round at which the bound is enforced.
    pub fn warm_up(&self) -> u64 {
        2 * self.num_arms as u64
    }
}

impl RoundChecker for SwLeaderChecker {
    fn push(&mut self, rec: &RoundRecord) {
        if rec.round < self.warm_up() {
            return;
        }
        self.report.rounds_checked += 1;
        let n = rec.counts[rec.leader];
        let m = rec.round.min(self.tau);
        // n >= m / (2K) in integers
        if 2 * self.num_arms as u64 * n < m {
            self.report.record(
                rec.round,
                format!(
                    "windowed leader count {n} < min(r,τ)/(2K) = {}",
                    m as f64 / (2.0 * self.num_arms as f64)
                ),
            );
        }
    }

    fn report(&self) -> &CheckReport {
        &self.report
    }
}

/// Storage bound of LB-SDA-LM: every stored history fits the round's
/// capacity `m_r`.
#[derive(Debug, Clone, Default)]
pub struct StorageChecker {
    report: CheckReport,
    high_water: usize,
}

impl StorageChecker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn high_water(&self) -> usize {
        self.high_water
    }
}

impl RoundChecker for StorageChecker {
    fn push(&mut self, rec: &RoundRecord) {
        self.report.rounds_checked += 1;
        let max = rec.stored.iter().copied().max().unwrap_or(0);
        self.high_water = self.high_water.max(max);
        if let Some(cap) = rec.capacity {
            if max > cap {
                self.report
                    .record(rec.round, format!("stored {max} > capacity {cap}"));
            }
        }
        for (k, (&s, &n)) in rec.stored.iter().zip(&rec.counts).enumerate() {
            if s as u64 > n {
                self.report.record(
                    rec.round,
                    format!("arm {k} stores {s} rewards but was pulled {n} times"),
                );
            }
        }
    }

    fn report(&self) -> &CheckReport {
        &self.report
    }
}

/// The checker matching a policy's trajectory kind.
pub fn checker_for(kind: TrajectoryKind, num_arms: usize) -> Result<Box<dyn RoundChecker + Send>> {
    Ok(match kind {
        TrajectoryKind::LbSda => Box::new(LeaderCountChecker::new(num_arms)?),
        TrajectoryKind::LbSdaLm => Box::new(StorageChecker::new()),
        TrajectoryKind::SwLbSda { tau } => Box::new(SwLeaderChecker::new(num_arms, tau)),
    })
}

/// Audits an LB-SDA trajectory for `W_r = N_{ℓ(r)}(r) ≥ r/K`.
pub fn check_lemma_wt(trajectory: &Trajectory) -> Result<CheckReport> {
    if trajectory.kind != TrajectoryKind::LbSda {
        return Err(Error::Argument(format!(
            "leader-count identity only holds for unbounded LB-SDA, got {:?}",
            trajectory.kind
        )));
    }
    let mut c = LeaderCountChecker::new(trajectory.num_arms)?;
    trajectory.rounds.iter().for_each(|r| c.push(r));
    Ok(c.report)
}

/// Audits a SW-LB-SDA trajectory for the windowed leader bound.
pub fn check_sw_leader_bound(trajectory: &Trajectory, tau: u64) -> Result<CheckReport> {
    if !matches!(trajectory.kind, TrajectoryKind::SwLbSda { .. }) {
        return Err(Error::Argument(format!(
            "windowed leader bound needs a SW-LB-SDA trajectory, got {:?}",
            trajectory.kind
        )));
    }
    let mut c = SwLeaderChecker::new(trajectory.num_arms, tau);
    trajectory.rounds.iter().for_each(|r| c.push(r));
    Ok(c.report)
}

/// Audits stored lengths against capacities.
pub fn check_storage(trajectory: &Trajectory) -> (CheckReport, usize) {
    let mut c = StorageChecker::new();
    trajectory.rounds.iter().for_each(|r| c.push(r));
    (c.report, c.high_water)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(round: u64, leader: usize, counts: Vec<u64>, pulled: Vec<usize>) -> RoundRecord {
        RoundRecord {
            round,
            leader,
            stored: counts.iter().map(|&c| c as usize).collect(),
            counts,
            capacity: None,
            pulled,
        }
    }

    #[test]
    fn leader_only_trace() {
        // round 1 pulls both arms; rounds 2..=5 pull the leader only
        let mut t = Trajectory::new(TrajectoryKind::LbSda, 2);
        for r in 1..=5u64 {
            t.rounds.push(rec(r, 0, vec![r, 1], vec![0]));
        }
        let report = check_lemma_wt(&t).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.rounds_checked, 5);
    }

    #[test]
    fn detects_leader_count_mismatch() {
        let mut t = Trajectory::new(TrajectoryKind::LbSda, 2);
        // round 1: challenger 1 wins, then round 2 it leads with 2 pulls
        t.rounds.push(rec(1, 0, vec![1, 1], vec![1]));
        t.rounds.push(rec(2, 1, vec![1, 2], vec![1]));
        let report = check_lemma_wt(&t).unwrap();
        assert_eq!(report.violations, 1);
        assert_eq!(report.first.unwrap().round, 2);
    }

    #[test]
    fn rejects_other_policies_and_small_k() {
        let t = Trajectory::new(TrajectoryKind::SwLbSda { tau: 10 }, 2);
        assert!(check_lemma_wt(&t).is_err());
        let t = Trajectory::new(TrajectoryKind::LbSda, 1);
        assert!(check_lemma_wt(&t).is_err());
        let t = Trajectory::new(TrajectoryKind::LbSda, 2);
        assert!(check_sw_leader_bound(&t, 10).is_err());
    }

    #[test]
    fn sw_bound_regimes() {
        let tau = 100;
        let mut t = Trajectory::new(TrajectoryKind::SwLbSda { tau }, 2);
        // r <= τ: bound r/4; r = 40 needs 10
        t.rounds.push(rec(40, 0, vec![10, 30], vec![1]));
        // r > τ: bound τ/4 = 25
        t.rounds.push(rec(500, 0, vec![25, 75], vec![1]));
        assert!(check_sw_leader_bound(&t, tau).unwrap().passed());
        t.rounds.push(rec(501, 0, vec![24, 76], vec![1]));
        t.rounds.push(rec(41, 0, vec![10, 31], vec![1]));
        let r = check_sw_leader_bound(&t, tau).unwrap();
        assert_eq!(r.violations, 2);
        // warm-up rounds are exempt
        let mut t = Trajectory::new(TrajectoryKind::SwLbSda { tau }, 2);
        t.rounds.push(rec(3, 0, vec![0, 3], vec![1]));
        assert_eq!(check_sw_leader_bound(&t, tau).unwrap().rounds_checked, 0);
    }

    #[test]
    fn storage_checks() {
        let mut t = Trajectory::new(TrajectoryKind::LbSdaLm, 2);
        let mut r = rec(10, 0, vec![8, 2], vec![0]);
        r.stored = vec![5, 2];
        r.capacity = Some(5);
        t.rounds.push(r.clone());
        let (rep, hw) = check_storage(&t);
        assert!(rep.passed());
        assert_eq!(hw, 5);
        r.stored = vec![6, 2];
        t.rounds.push(r);
        assert_eq!(check_storage(&t).0.violations, 1);
    }

    #[test]
    fn ndjson_one_line_per_round() {
        let mut t = Trajectory::new(TrajectoryKind::LbSda, 2);
        t.rounds.push(rec(1, 0, vec![1, 1], vec![0]));
        t.rounds.push(rec(2, 0, vec![2, 1], vec![1]));
        let mut buf = Vec::new();
        t.write_ndjson(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let back: RoundRecord = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(back, t.rounds[1]);
    }
}
