use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::aggregate::{AggregateResult, FinalSummary};
use super::ExperimentConfig;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,policy,mean_regret,q25,q75";

/// Writes one row per (policy, checkpoint), policies in config order. Floats
/// use the shortest representation that parses back to the same value.
pub fn write_csv(result: &AggregateResult, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in &result.policies {
        for (i, t) in result.checkpoints.iter().enumerate() {
            writeln!(out, "{t},{},{},{},{}", p.label, p.mean[i], p.q25[i], p.q75[i])?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub t: u64,
    pub policy: String,
    pub mean_regret: f64,
    pub q25: f64,
    pub q75: f64,
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(parse_err(1, format!("expected header {CSV_HEADER:?}, got {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(i + 2, format!("expected 5 fields, got {}", fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| parse_err(i + 2, format!("{s:?}: {e}")));
        rows.push(CsvRow {
            t: fields[0].parse().map_err(|e| parse_err(i + 2, format!("t: {e}")))?,
            policy: fields[1].to_string(),
            mean_regret: num(fields[2])?,
            q25: num(fields[3])?,
            q75: num(fields[4])?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Software {
    pub name: String,
    pub version: String,
}

/// Means and σ of one phase, for timeline plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub start: u64,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyManifest {
    pub label: String,
    pub name: String,
    pub wall_time_seconds: f64,
    #[serde(rename = "final")]
    pub final_regret: FinalSummary,
    pub mean_pulls: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub storage_high_water: Vec<usize>,
    pub invariant_violations: u64,
    pub clamped_rewards: u64,
}

/// Side-car description of a run: config echo, seeds, versions, timings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub software: Software,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub csv: String,
    pub phases: Vec<PhaseSummary>,
    pub policies: Vec<PolicyManifest>,
    pub wall_time_seconds: f64,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, result: &AggregateResult, csv_name: &str) -> Self {
        Manifest {
            software: Software {
                name: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            config: config.clone(),
            seeds: result.seeds.clone(),
            csv: csv_name.to_string(),
            phases: config
                .environment
                .phases()
                .iter()
                .map(|p| PhaseSummary {
                    start: p.start,
                    means: p.arms.iter().map(|a| a.mean).collect(),
                    scales: p.arms.iter().map(|a| a.scale).collect(),
                })
                .collect(),
            policies: result
                .policies
                .iter()
                .map(|p| PolicyManifest {
                    label: p.label.clone(),
                    name: p.spec.name.clone(),
                    wall_time_seconds: p.wall_time,
                    final_regret: p.final_summary.clone(),
                    mean_pulls: p.mean_pulls.clone(),
                    storage_high_water: p.storage_high_water.clone(),
                    invariant_violations: p.invariant_violations,
                    clamped_rewards: p.clamped_rewards,
                })
                .collect(),
            wall_time_seconds: result.policies.iter().map(|p| p.wall_time).sum(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistedFiles {
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

/// Writes `<stem>.csv` and `<stem>.manifest.json` into `dir` (created if
/// missing).
pub fn persist(result: &AggregateResult, config: &ExperimentConfig, dir: &Path, stem: &str) -> Result<PersistedFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_name = format!("{stem}.csv");
    let csv = dir.join(&csv_name);
    let manifest = dir.join(format!("{stem}.manifest.json"));

    let file = std::fs::File::create(&csv).map_err(|e| Error::io(&csv, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_csv(result, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&csv, e))?;

    let m = Manifest::new(config, result, &csv_name);
    let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
    std::fs::write(&manifest, text + "\n").map_err(|e| Error::io(&manifest, e))?;
    Ok(PersistedFiles { csv, manifest })
}
