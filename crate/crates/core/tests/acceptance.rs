//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! fails.

use std::time::Instant;

use lbsda::baselines::exp3s::Exp3s;
use lbsda::baselines::index::klucb_index;
use lbsda::baselines::{Forgetting, StepStats};
use lbsda::cli::presets;
use lbsda::harness::{persist, Checkpoints};
use lbsda::sda::MemoryForm;
use lbsda::verify::suites::{balance_suite, lemma_wt_suite, sw_leader_suite, SuiteOptions};
use lbsda::{run_experiment, ExperimentConfig, Family, Policy, PolicySpec};

struct Line {
    id: u32,
    passed: bool,
    detail: String,
}

fn report(lines: &mut Vec<Line>, id: u32, passed: bool, detail: String) {
    println!("criterion {id}: {} - {detail}", if passed { "PASS" } else { "FAIL" });
    lines.push(Line { id, passed, detail });
}

fn lemma_wt() -> (bool, String) {
    let started = Instant::now();
    let opts = SuiteOptions {
        runs: 50,
        horizon: Some(5000),
        ..Default::default()
    };
    let out = lemma_wt_suite(&opts).expect("suite runs");
    let secs = started.elapsed().as_secs_f64();
    (out.passed && secs < 30.0, format!("{}, {secs:.1}s (limit 30s)", out.detail))
}

fn sw_leader() -> (bool, String) {
    let started = Instant::now();
    let opts = SuiteOptions {
        runs: 50,
        horizon: Some(10_000),
        ..Default::default()
    };
    let out = sw_leader_suite(&opts).expect("suite runs");
    let secs = started.elapsed().as_secs_f64();
    (out.passed && secs < 120.0, format!("{}, {secs:.1}s (limit 120s)", out.detail))
}

/// LB-SDA and LB-SDA-LM (additive, floor 50) on the same seeds.
fn stationary_pair() -> lbsda::AggregateResult {
    let mut lm = PolicySpec::named("lb-sda-lm");
    lm.schedule = Some(MemoryForm::Additive);
    lm.floor = Some(50);
    let env = presets::bernoulli_stationary_environment(10_000).unwrap();
    let mut cfg = ExperimentConfig::new(env, vec![PolicySpec::named("lb-sda"), lm]);
    cfg.replications = 500;
    cfg.checkpoints = Checkpoints::List(vec![5000, 10_000]);
    run_experiment(&cfg, 0).expect("experiment runs")
}

fn log_regret(res: &lbsda::AggregateResult, secs: f64) -> (bool, String) {
    let p = res.policy("lb-sda").unwrap();
    let (half, full) = (p.mean[0], p.mean[1]);
    let ok = full <= 55.0 && full - half < 0.8 * half && secs < 300.0;
    (
        ok,
        format!(
            "500 reps, mean regret {full:.2} (limit 55), growth 5000->10^4 {:.2} vs 0.8 x {half:.2} = {:.2}, {secs:.1}s",
            full - half,
            0.8 * half
        ),
    )
}

fn limited_memory(res: &lbsda::AggregateResult) -> (bool, String) {
    let full = res.policy("lb-sda").unwrap().final_summary.mean;
    let lm = res.policy("lb-sda-lm").unwrap();
    let high = lm.storage_high_water.iter().copied().max().unwrap_or(0);
    let rel = (lm.final_summary.mean - full).abs() / full;
    (
        high <= 135 && rel <= 0.25,
        format!(
            "max stored {high} (limit 135), mean regret {:.2} vs {full:.2} ({:.1}% apart, limit 25%)",
            lm.final_summary.mean,
            100.0 * rel
        ),
    )
}

fn gaussian_switching() -> (bool, String) {
    let env = presets::gaussian_switching_environment(10_000, [0.5; 4]).unwrap();
    let policies = ["sw-lb-sda", "ucb1", "sw-klucb"].map(PolicySpec::named).to_vec();
    let mut cfg = ExperimentConfig::new(env, policies);
    cfg.replications = 200;
    cfg.checkpoints = Checkpoints::List(vec![10_000]);
    let res = run_experiment(&cfg, 0).expect("experiment runs");
    let m = |l: &str| res.policy(l).unwrap().final_summary.mean;
    let (sw, ucb, kl) = (m("sw-lb-sda"), m("ucb1"), m("sw-klucb"));
    (
        sw < 0.5 * ucb && sw <= 1.2 * kl,
        format!(
            "200 reps, sw-lb-sda {sw:.1}, ucb1 {ucb:.1} (ratio {:.2}, limit 0.5), sw-klucb {kl:.1} (ratio {:.2}, limit 1.2)",
            sw / ucb,
            sw / kl
        ),
    )
}

fn balance() -> (bool, String) {
    let out = balance_suite(&SuiteOptions::default()).expect("suite runs");
    let passed = out.iter().all(|o| o.passed);
    (passed, out.iter().map(|o| o.detail.clone()).collect::<Vec<_>>().join("; "))
}

fn baseline_math() -> (bool, String) {
    let idx = klucb_index(0.0, 1.0, 1.0, Family::Bernoulli, 0.0);
    let target = 1.0 - (-1.0f64).exp();
    let kl_ok = (idx - target).abs() <= 1e-6;

    let g = 0.99;
    let mut stats = StepStats::new(2, Forgetting::Discount(g));
    let mut worst: f64 = 0.0;
    for t in 1..=5000u64 {
        stats.update((t % 2) as usize, 1.0);
        let expected = (1.0 - g.powi(t as i32)) / (1.0 - g);
        worst = worst.max((stats.total_count() - expected).abs());
    }
    let geo_ok = worst <= 1e-9;

    let (alpha, gamma) = lbsda::baselines::tuning::exp3s_parameters_for(3, 10_000, 3);
    let mut p = Exp3s::new(3, alpha, gamma, None).unwrap();
    let mut rng = lbsda::sim_rng(7);
    let means = [0.2, 0.5, 0.8];
    let mut min_p = f64::INFINITY;
    for _ in 0..10_000 {
        min_p = min_p.min(p.probabilities().iter().copied().fold(f64::INFINITY, f64::min));
        let arm = p.select(&mut rng)[0];
        let reward = if rand::Rng::random::<f64>(&mut rng) < means[arm] { 1.0 } else { 0.0 };
        p.observe(arm, reward);
    }
    let floor = gamma / 3.0;
    let exp_ok = min_p >= floor * (1.0 - 1e-12);
    (
        kl_ok && geo_ok && exp_ok,
        format!(
            "klucb(0,1,1) = {idx:.9} (target {target:.9}); discount identity max error {worst:.1e}; \
             EXP3S min p {min_p:.6} >= gamma/K = {floor:.6}"
        ),
    )
}

fn determinism() -> (bool, String) {
    let cfg = presets::expand("fig4-bernoulli-switching", Some(3000), Some(16), Some(11)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let a = persist(&run_experiment(&cfg, 1).unwrap(), &cfg, dir.path(), "one").unwrap();
    let b = persist(&run_experiment(&cfg, 8).unwrap(), &cfg, dir.path(), "eight").unwrap();
    let (x, y) = (std::fs::read(a.csv).unwrap(), std::fs::read(b.csv).unwrap());
    (x == y, format!("{} bytes with 1 worker, {} with 8, identical: {}", x.len(), y.len(), x == y))
}

fn main() {
    let mut lines = Vec::new();
    let (ok, d) = lemma_wt();
    report(&mut lines, 1, ok, d);
    let (ok, d) = sw_leader();
    report(&mut lines, 2, ok, d);
    let started = Instant::now();
    let pair = stationary_pair();
    let (ok, d) = log_regret(&pair, started.elapsed().as_secs_f64());
    report(&mut lines, 3, ok, d);
    let (ok, d) = limited_memory(&pair);
    report(&mut lines, 4, ok, d);
    let (ok, d) = gaussian_switching();
    report(&mut lines, 5, ok, d);
    let (ok, d) = balance();
    report(&mut lines, 6, ok, d);
    let (ok, d) = baseline_math();
    report(&mut lines, 7, ok, d);
    let (ok, d) = determinism();
    report(&mut lines, 8, ok, d);

    let failed: Vec<u32> = lines.iter().filter(|l| !l.passed).map(|l| l.id).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria pass", lines.len(), lines.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        for l in lines.iter().filter(|l| !l.passed) {
            eprintln!("criterion {} failed: {}", l.id, l.detail);
        }
        std::process::exit(1);
    }
}
