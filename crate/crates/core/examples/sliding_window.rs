//! SW-LB-SDA on the switching Bernoulli instance, with the tuned window.
//!
//! ```bash
//! cargo run --release --example sliding_window
//! ```

use lbsda::baselines::tuning;
use lbsda::cli::presets;
use lbsda::sda::diversity_window;
use lbsda::{run_experiment, ExperimentConfig, PolicySpec};

fn main() -> lbsda::Result<()> {
    let env = presets::bernoulli_switching_environment(10_000)?;
    let tau = tuning::sliding_window(&env, false);
    println!("tau = {tau}, diversity window = {}", diversity_window(env.num_arms(), tau));

    let mut short = PolicySpec::named("sw-lb-sda").with_label("tau-100");
    short.tau = Some(100);
    let policies = vec![PolicySpec::named("sw-lb-sda"), short, PolicySpec::named("lb-sda")];
    let mut cfg = ExperimentConfig::new(env, policies);
    cfg.replications = 100;
    cfg.invariant_checks = true;

    let res = run_experiment(&cfg, 0)?;
    for p in &res.policies {
        println!(
            "{:<10} dynamic regret {:>8.1} (q25 {:.1}, q75 {:.1}), rounds checked {}, violations {}",
            p.label, p.final_summary.mean, p.final_summary.q25, p.final_summary.q75, p.rounds_checked, p.invariant_violations
        );
    }
    Ok(())
}
