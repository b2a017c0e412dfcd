//! Checker suites run by `sda-bench verify`.

use rand::Rng;
use rayon::prelude::*;

use super::balance::{balance_exact_bernoulli, balance_monte_carlo, check_balance_upper_bound_grid, BalanceQuery};
use super::trajectory::{check_lemma_wt, check_storage, check_sw_leader_bound, CheckReport};
use crate::baselines::tuning;
use crate::cli::presets;
use crate::envs::{ArmModel, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::harness::{run_replication, ExperimentConfig};
use crate::policy::PolicySpec;
use crate::sda::MemorySchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Balance,
    LemmaWt,
    SwLeader,
    Storage,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "balance" => Suite::Balance,
            "lemma-wt" => Suite::LemmaWt,
            "sw-leader" => Suite::SwLeader,
            "storage" => Suite::Storage,
            "all" => Suite::All,
            other => {
                return Err(Error::Argument(format!(
                    "unknown suite {other:?} (expected balance, lemma-wt, sw-leader, storage or all)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub runs: u64,
    /// Overrides each suite's default horizon.
    pub horizon: Option<u64>,
    pub seed: u64,
    pub queries: u64,
    pub samples: usize,
    pub schedule: MemorySchedule,
    /// Worker threads (0 = all cores).
    pub workers: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            runs: 50,
            horizon: None,
            seed: 0,
            queries: 100,
            samples: 1_000_000,
            schedule: MemorySchedule::additive(50),
            workers: 0,
        }
    }
}

/// Pass/fail result of one property.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub property: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {}: {}", self.property, self.detail)
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<SuiteOutcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Argument(format!("cannot build worker pool: {e}")))?;
    pool.install(|| match suite {
        Suite::Balance => balance_suite(opts),
        Suite::LemmaWt => Ok(vec![lemma_wt_suite(opts)?]),
        Suite::SwLeader => Ok(vec![sw_leader_suite(opts)?]),
        Suite::Storage => Ok(vec![storage_suite(opts)?]),
        Suite::All => {
            let mut out = balance_suite(opts)?;
            out.push(lemma_wt_suite(opts)?);
            out.push(sw_leader_suite(opts)?);
            out.push(storage_suite(opts)?);
            Ok(out)
        }
    })
}

/// Random Bernoulli query with `j ≤ 10` and `M ≤ 100`.
pub fn random_bernoulli_query<R: Rng + ?Sized>(rng: &mut R) -> BalanceQuery {
    loop {
        let a: f64 = rng.random_range(0.02..0.98);
        let b: f64 = rng.random_range(0.02..0.98);
        if (a - b).abs() < 0.01 {
            continue;
        }
        let j = rng.random_range(1..=10);
        let m = rng.random_range(1..=100);
        return BalanceQuery::bernoulli(a.max(b), a.min(b), j, m).expect("valid query");
    }
}

/// Monte Carlo against exact enumeration on random queries, and the upper
/// bound on the full grid `(p⋆, p) ∈ {0.2, …, 0.8}²`, `j ≤ 10`,
/// `M ∈ {1, 10, 100}`.
pub fn balance_suite(opts: &SuiteOptions) -> Result<Vec<SuiteOutcome>> {
    let agreements: Vec<bool> = (0..opts.queries)
        .into_par_iter()
        .map(|i| {
            let mut rng = crate::sim_rng(opts.seed.wrapping_add(i));
            let q = random_bernoulli_query(&mut rng);
            let exact = balance_exact_bernoulli(&q)?;
            let est = balance_monte_carlo(&q, opts.samples, &mut rng);
            Ok((est.estimate - exact).abs() <= 3.0 * est.std_error)
        })
        .collect::<Result<_>>()?;
    let agree = agreements.iter().filter(|&&a| a).count() as u64;
    let needed = (opts.queries * 99).div_ceil(100);

    let grid: Vec<f64> = (2..=8).map(|i| i as f64 / 10.0).collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for &po in &grid {
        for &ps in grid.iter().filter(|&&p| p < po) {
            for j in 1..=10 {
                for m in [1, 10, 100] {
                    let q = BalanceQuery::bernoulli(po, ps, j, m)?;
                    checked += 1;
                    if !check_balance_upper_bound_grid(&q)? {
                        failures.push(format!("({po}, {ps}, j={j}, M={m})"));
                    }
                }
            }
        }
    }
    Ok(vec![
        SuiteOutcome {
            property: "balance monte carlo vs exact".into(),
            passed: agree >= needed,
            detail: format!(
                "{agree}/{} queries within 3 standard errors ({} samples each, need {needed})",
                opts.queries, opts.samples
            ),
        },
        SuiteOutcome {
            property: "balance upper bound grid".into(),
            passed: failures.is_empty(),
            detail: if failures.is_empty() {
                format!("{checked} queries, bound holds at every support point")
            } else {
                format!("{} of {checked} queries fail, first {}", failures.len(), failures[0])
            },
        },
    ])
}

fn summarize(property: &str, runs: u64, report: &CheckReport, extra: String) -> SuiteOutcome {
    let mut detail = format!(
        "{runs} runs, {} rounds checked, {} violations{extra}",
        report.rounds_checked, report.violations
    );
    if let Some(v) = &report.first {
        detail.push_str(&format!("; first at round {}: {}", v.round, v.message));
    }
    SuiteOutcome {
        property: property.into(),
        passed: report.passed(),
        detail,
    }
}

fn traced(env: EnvironmentSpec) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(env, vec![]);
    cfg.record_trajectories = true;
    cfg
}

/// LB-SDA on random Bernoulli instances, alternating `K = 2` and `K = 5`.
pub fn lemma_wt_instance(seed: u64, run: u64, horizon: u64) -> Result<EnvironmentSpec> {
    let k = if run.is_multiple_of(2) { 2 } else { 5 };
    let mut rng = crate::sim_rng(seed.wrapping_add(run).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let arms = (0..k)
        .map(|_| ArmModel::bernoulli(rng.random::<f64>()))
        .collect::<Result<Vec<_>>>()?;
    EnvironmentSpec::stationary(horizon, arms)
}

pub fn lemma_wt_suite(opts: &SuiteOptions) -> Result<SuiteOutcome> {
    let horizon = opts.horizon.unwrap_or(5000);
    let spec = PolicySpec::named("lb-sda");
    let reports: Vec<CheckReport> = (0..opts.runs)
        .into_par_iter()
        .map(|i| {
            let cfg = traced(lemma_wt_instance(opts.seed, i, horizon)?);
            let run = run_replication(&cfg, &spec, opts.seed.wrapping_add(i))?;
            check_lemma_wt(run.trajectory.as_ref().expect("trajectory recorded"))
        })
        .collect::<Result<_>>()?;
    let mut total = CheckReport::default();
    reports.iter().for_each(|r| total.merge(r));
    Ok(summarize(
        "leader count W_r = N_leader >= r/K",
        opts.runs,
        &total,
        format!(", T = {horizon}"),
    ))
}

pub fn sw_leader_suite(opts: &SuiteOptions) -> Result<SuiteOutcome> {
    let horizon = opts.horizon.unwrap_or(10_000);
    let env = presets::bernoulli_switching_environment(horizon)?;
    let tau = tuning::sliding_window(&env, false);
    let mut spec = PolicySpec::named("sw-lb-sda");
    spec.tau = Some(tau);
    let cfg = traced(env);
    let reports: Vec<CheckReport> = (0..opts.runs)
        .into_par_iter()
        .map(|i| {
            let run = run_replication(&cfg, &spec, opts.seed.wrapping_add(i))?;
            check_sw_leader_bound(run.trajectory.as_ref().expect("trajectory recorded"), tau)
        })
        .collect::<Result<_>>()?;
    let mut total = CheckReport::default();
    reports.iter().for_each(|r| total.merge(r));
    Ok(summarize(
        "windowed leader count >= min(r,tau)/(2K)",
        opts.runs,
        &total,
        format!(", T = {horizon}, tau = {tau}, 4 phases"),
    ))
}

pub fn storage_suite(opts: &SuiteOptions) -> Result<SuiteOutcome> {
    let horizon = opts.horizon.unwrap_or(10_000);
    let env = presets::bernoulli_stationary_environment(horizon)?;
    let mut spec = PolicySpec::named("lb-sda-lm");
    spec.schedule = Some(opts.schedule.form);
    spec.floor = Some(opts.schedule.floor);
    spec.coefficient = Some(opts.schedule.coefficient);
    let bound = opts.schedule.capacity(horizon);
    let cfg = traced(env);
    let results: Vec<(CheckReport, usize)> = (0..opts.runs)
        .into_par_iter()
        .map(|i| {
            let run = run_replication(&cfg, &spec, opts.seed.wrapping_add(i))?;
            let (report, _) = check_storage(run.trajectory.as_ref().expect("trajectory recorded"));
            let high = run.storage_high_water.iter().copied().max().unwrap_or(0);
            Ok((report, high))
        })
        .collect::<Result<_>>()?;
    let mut total = CheckReport::default();
    let mut high = 0;
    for (r, h) in &results {
        total.merge(r);
        high = high.max(*h);
    }
    let mut out = summarize(
        "stored rewards <= m_r",
        opts.runs,
        &total,
        format!(", T = {horizon}, max stored {high} (bound {bound})"),
    );
    out.passed &= high <= bound;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        assert_eq!("lemma-wt".parse::<Suite>().unwrap(), Suite::LemmaWt);
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        let opts = SuiteOptions {
            runs: 4,
            horizon: Some(800),
            queries: 5,
            samples: 20_000,
            ..Default::default()
        };
        let out = run_suite(Suite::All, &opts).unwrap();
        assert_eq!(out.len(), 5);
        for o in &out[1..] {
            assert!(o.passed, "{o}");
        }
    }

    #[test]
    fn random_queries_are_valid() {
        let mut rng = crate::sim_rng(0);
        for _ in 0..1000 {
            let q = random_bernoulli_query(&mut rng);
            assert!(q.optimal.mean > q.suboptimal.mean);
            assert!((1..=10).contains(&q.block_size) && (1..=100).contains(&q.duel_count));
        }
    }
}
