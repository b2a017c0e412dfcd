//! LB-SDA against kl-UCB and Thompson sampling on two Bernoulli arms.
//!
//! ```bash
//! cargo run --release --example lbsda_stationary
//! ```

use lbsda::cli::presets;
use lbsda::harness::Checkpoints;
use lbsda::{run_experiment, ExperimentConfig, PolicySpec};

fn main() -> lbsda::Result<()> {
    let env = presets::bernoulli_stationary_environment(10_000)?;
    let policies = ["lb-sda", "klucb", "ts"].map(PolicySpec::named).to_vec();
    let mut cfg = ExperimentConfig::new(env, policies);
    cfg.replications = 200;
    cfg.checkpoints = Checkpoints::List(vec![100, 1000, 5000, 10_000]);

    let res = run_experiment(&cfg, 0)?;
    print!("{:>8}", "t");
    for p in &res.policies {
        print!("{:>12}", p.label);
    }
    println!();
    for (i, t) in res.checkpoints.iter().enumerate() {
        print!("{t:>8}");
        for p in &res.policies {
            print!("{:>12.2}", p.mean[i]);
        }
        println!();
    }
    Ok(())
}
