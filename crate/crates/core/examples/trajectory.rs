//! Records the round log of one LB-SDA run, writes it as newline-delimited
//! JSON and checks the leader-count identity on it.
//!
//! ```bash
//! cargo run --release --example trajectory -- /tmp/lbsda.ndjson
//! ```

use std::path::PathBuf;

use lbsda::verify::trajectory::check_lemma_wt;
use lbsda::{run_replication, ArmModel, EnvironmentSpec, ExperimentConfig, PolicySpec};

fn main() -> lbsda::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("lbsda-trajectory.ndjson"));

    let arms = [0.3, 0.5, 0.45, 0.7, 0.1].iter().map(|&m| ArmModel::bernoulli(m)).collect::<Result<_, _>>()?;
    let mut cfg = ExperimentConfig::new(EnvironmentSpec::stationary(5000, arms)?, vec![]);
    cfg.record_trajectories = true;

    let run = run_replication(&cfg, &PolicySpec::named("lb-sda"), 42)?;
    let traj = run.trajectory.expect("recorded");
    traj.export(&path)?;
    let report = check_lemma_wt(&traj)?;
    let last = traj.rounds.last().expect("at least one round");
    println!("{} rounds written to {}", traj.rounds.len(), path.display());
    println!("final leader {} with counts {:?}", last.leader, last.counts);
    println!("{} rounds checked, {} violations", report.rounds_checked, report.violations);
    Ok(())
}
