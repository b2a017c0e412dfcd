//! Loads an experiment from TOML, runs it and writes the CSV and manifest.
//!
//! ```bash
//! cargo run --release --example config_file -- results/example
//! ```

use std::path::PathBuf;

use lbsda::cli::{parse_config_str, presets, to_toml};
use lbsda::harness::{persist, Manifest};
use lbsda::run_experiment;

const CONFIG: &str = r#"
horizon = 2000
replications = 50
seed = 7
checkpoints = 50

[environment]
family = "gaussian"

[[environment.phases]]
start = 1
means = [1.0, 0.5, 0.0]
scale = 0.5

[[environment.phases]]
start = 1001
means = [0.0, 0.5, 1.0]
scale = 0.5

[[policies]]
name = "sw-lb-sda"

[[policies]]
name = "sw-klucb"
label = "sw-klucb-300"
tau = 300
"#;

fn main() -> lbsda::Result<()> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("lbsda-example"));

    let cfg = parse_config_str(CONFIG)?;
    let res = run_experiment(&cfg, 0)?;
    let files = persist(&res, &cfg, &out, "two-phase")?;
    let manifest = Manifest::load(&files.manifest)?;
    for p in &manifest.policies {
        println!("{:<14} final regret {:.1}", p.label, p.final_regret.mean);
    }
    println!("wrote {}", files.csv.display());

    // presets are ordinary configs
    let preset = presets::expand("fig5-gauss-switching", None, Some(10), None)?;
    println!("\n{}", to_toml(&preset));
    Ok(())
}
