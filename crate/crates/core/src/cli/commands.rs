use std::path::{Path, PathBuf};

use super::{exit, presets, ExportArgs, Overrides, PresetsArgs, RunArgs, Source, VerifyArgs};
use crate::error::{Error, Result};
use crate::harness::{persist, run_experiment, run_replication, Checkpoints, ExperimentConfig};
use crate::verify::suites::{run_suite, SuiteOptions};
use crate::verify::trajectory::{check_lemma_wt, check_storage, check_sw_leader_bound, TrajectoryKind};

/// Loads the config named by `source` and applies the overrides. Returns the
/// config and a default file stem.
pub fn load_source(source: &Source, overrides: &Overrides) -> Result<(ExperimentConfig, String)> {
    match (&source.config, &source.preset) {
        (Some(path), None) => {
            let mut cfg = super::parse_config(path)?;
            if let Some(t) = overrides.horizon {
                cfg.environment = cfg.environment.with_horizon(t)?;
            }
            if let Some(r) = overrides.replications {
                cfg.replications = r;
            }
            if let Some(s) = overrides.seed {
                cfg.base_seed = s;
            }
            cfg.validate()?;
            let stem = path
                .file_stem()
                .map_or_else(|| "experiment".to_string(), |s| s.to_string_lossy().into_owned());
            Ok((cfg, stem))
        }
        (None, Some(name)) => Ok((
            presets::expand(name, overrides.horizon, overrides.replications, overrides.seed)?,
            name.clone(),
        )),
        _ => Err(Error::Argument("exactly one of --config and --preset is required".into())),
    }
}

/// Warns when forgetting policies fall back to defaults on a stationary
/// environment.
fn warn_stationary_defaults(cfg: &ExperimentConfig) {
    if cfg.environment.num_breakpoints() > 0 {
        return;
    }
    for p in &cfg.policies {
        let windowed = matches!(p.name.as_str(), "sw-lb-sda" | "sw-ucb" | "sw-klucb" | "sw-ts");
        let discounted = matches!(p.name.as_str(), "d-ucb" | "d-klucb" | "dts");
        if windowed && p.tau.is_none() {
            eprintln!(
                "warning: {}: no breakpoints, window defaults to the horizon tau = {}",
                p.label(),
                cfg.horizon()
            );
        }
        if discounted && p.gamma.is_none() {
            eprintln!(
                "warning: {}: no breakpoints, discount tuned as if there were one (gamma = {})",
                p.label(),
                p.resolved_gamma(&cfg.environment)
            );
        }
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<i32> {
    let (mut cfg, stem) = load_source(&args.source, &args.overrides)?;
    if args.full_series {
        cfg.checkpoints = Checkpoints::All;
    }
    cfg.invariant_checks |= args.invariant_checks;
    warn_stationary_defaults(&cfg);
    let result = run_experiment(&cfg, args.workers)?;
    let stem = args.name.clone().unwrap_or(stem);
    let files = persist(&result, &cfg, &args.out_dir, &stem)?;

    println!(
        "{:<16} {:>12} {:>12} {:>12} {:>10}",
        "policy", "mean_regret", "q25", "q75", "wall_s"
    );
    for p in &result.policies {
        let f = &p.final_summary;
        println!(
            "{:<16} {:>12.3} {:>12.3} {:>12.3} {:>10.2}",
            p.label, f.mean, f.q25, f.q75, p.wall_time
        );
    }
    println!("wrote {} and {}", files.csv.display(), files.manifest.display());

    if cfg.invariant_checks {
        let mut failed = false;
        for p in &result.policies {
            if let Some((seed, v)) = &p.first_violation {
                failed = true;
                eprintln!(
                    "invariant violation: {} ({} total), seed {seed}, round {}: {}",
                    p.label, p.invariant_violations, v.round, v.message
                );
            }
        }
        if failed {
            return Ok(exit::INVARIANT);
        }
    }
    Ok(exit::OK)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let opts = SuiteOptions {
        runs: args.runs,
        horizon: args.horizon,
        seed: args.seed,
        queries: args.queries,
        samples: args.samples,
        schedule: args.schedule,
        workers: args.workers,
    };
    let outcomes = run_suite(args.suite, &opts)?;
    for o in &outcomes {
        println!("{o}");
    }
    Ok(if outcomes.iter().all(|o| o.passed) {
        exit::OK
    } else {
        exit::INVARIANT
    })
}

pub fn cmd_presets(args: &PresetsArgs) -> Result<i32> {
    match &args.show {
        Some(name) => {
            let cfg = presets::expand(
                name,
                args.overrides.horizon,
                args.overrides.replications,
                args.overrides.seed,
            )?;
            print!("{}", super::to_toml(&cfg));
        }
        None => {
            for p in presets::PRESETS {
                println!("{:<28} {}", p.name, p.description);
            }
        }
    }
    Ok(exit::OK)
}

fn default_trajectory_path(dir: &Path, stem: &str, label: &str, seed: u64) -> PathBuf {
    dir.join(format!("{stem}-{label}-{seed}.ndjson"))
}

pub fn cmd_export_traj(args: &ExportArgs) -> Result<i32> {
    let (mut cfg, stem) = load_source(&args.source, &args.overrides)?;
    cfg.record_trajectories = true;
    let spec = match &args.policy {
        Some(label) => cfg
            .policies
            .iter()
            .find(|p| p.label() == label)
            .ok_or_else(|| Error::Argument(format!("no policy labelled {label:?} in the config")))?,
        None => cfg
            .policies
            .iter()
            .find(|p| p.is_round_based())
            .ok_or_else(|| Error::Argument("the config has no dueling policy to trace".into()))?,
    };
    if !spec.is_round_based() {
        return Err(Error::Argument(format!(
            "{} is step-based and has no round log",
            spec.label()
        )));
    }
    let seed = cfg.seed(args.replication);
    let run = run_replication(&cfg, spec, seed)?;
    let traj = run.trajectory.expect("round-based policies record a trajectory");
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| default_trajectory_path(&args.out_dir, &stem, spec.label(), seed));
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    traj.export(&out)?;
    let report = match traj.kind {
        TrajectoryKind::LbSda => check_lemma_wt(&traj)?,
        TrajectoryKind::SwLbSda { tau } => check_sw_leader_bound(&traj, tau)?,
        TrajectoryKind::LbSdaLm => check_storage(&traj).0,
    };
    println!(
        "wrote {} rounds to {} ({} rounds checked, {} violations)",
        traj.rounds.len(),
        out.display(),
        report.rounds_checked,
        report.violations
    );
    Ok(if report.passed() { exit::OK } else { exit::INVARIANT })
}
