//! Storage cap of LB-SDA-LM and its cost in regret.
//!
//! ```bash
//! cargo run --release --example limited_memory
//! ```

use lbsda::cli::presets;
use lbsda::sda::{MemoryForm, MemorySchedule};
use lbsda::{run_experiment, ExperimentConfig, PolicySpec};

fn main() -> lbsda::Result<()> {
    let additive = MemorySchedule::additive(50);
    for r in [1, 100, 1000, 10_000] {
        println!("m({r}) = {}", additive.capacity(r));
    }

    let mut policies = vec![PolicySpec::named("lb-sda")];
    for floor in [10, 50] {
        let mut lm = PolicySpec::named("lb-sda-lm").with_label(&format!("lm-{floor}"));
        lm.schedule = Some(MemoryForm::Additive);
        lm.floor = Some(floor);
        policies.push(lm);
    }
    let mut cfg = ExperimentConfig::new(presets::bernoulli_stationary_environment(10_000)?, policies);
    cfg.replications = 200;
    cfg.invariant_checks = true;

    let res = run_experiment(&cfg, 0)?;
    for p in &res.policies {
        println!(
            "{:<8} regret {:>7.2}  stored per arm {:?}  violations {}",
            p.label, p.final_summary.mean, p.storage_high_water, p.invariant_violations
        );
    }
    Ok(())
}
