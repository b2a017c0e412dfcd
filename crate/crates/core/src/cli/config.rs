//! TOML experiment configs.
//!
//! ```toml
//! horizon = 10000
//! replications = 500
//! seed = 7
//! invariant_checks = true      # optional, default false
//! record_trajectories = false  # optional
//! checkpoints = "log"          # "log", "all", a count, or a list of steps
//!
//! [environment]
//! family = "bernoulli"         # bernoulli | gaussian | poisson | exponential
//! means = [0.05, 0.15]         # stationary shorthand
//!
//! # or one entry per phase; `start` is the first step of the phase
//! # [[environment.phases]]
//! # start = 1
//! # means = [1.0, 0.5, 0.0]
//! # scale = 0.5                # gaussian σ for every arm, or `scales = [...]`
//!
//! [[policies]]
//! name = "lb-sda"
//!
//! [[policies]]
//! name = "sw-lb-sda"
//! tau = 350
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::envs::{ArmModel, EnvironmentSpec, Family, Phase};
use crate::error::{Error, Result, ValidationIssue};
use crate::harness::{Checkpoints, ExperimentConfig, DEFAULT_CHECKPOINTS};
use crate::policy::{PolicySpec, POLICY_NAMES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawCheckpoints {
    Name(String),
    Count(usize),
    List(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhase {
    start: u64,
    means: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scales: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvironment {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    means: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scales: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phases: Option<Vec<RawPhase>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    horizon: u64,
    #[serde(default = "one")]
    replications: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    record_trajectories: bool,
    #[serde(default)]
    invariant_checks: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    checkpoints: Option<RawCheckpoints>,
    environment: RawEnvironment,
    policies: Vec<PolicySpec>,
}

fn one() -> u64 {
    1
}

struct Issues(Vec<ValidationIssue>);

impl Issues {
    fn push(&mut self, key: impl Into<String>, message: impl Into<String>) {
        self.0.push(ValidationIssue {
            key: key.into(),
            message: message.into(),
        });
    }
}

/// Parses and validates a config file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        path: "<config>".into(),
        message: e.to_string(),
    })?;
    from_raw(raw)
}

fn phase_arms(
    family: Family,
    key: &str,
    means: &[f64],
    scale: Option<f64>,
    scales: Option<&[f64]>,
    issues: &mut Issues,
) -> Vec<ArmModel> {
    if family != Family::Gaussian && (scale.is_some() || scales.is_some()) {
        issues.push(format!("{key}.scale"), format!("only gaussian arms take a scale, family is {}", family.name()));
    }
    if let Some(s) = scales {
        if s.len() != means.len() {
            issues.push(
                format!("{key}.scales"),
                format!("has {} entries but there are {} means", s.len(), means.len()),
            );
        }
    }
    let mut arms = Vec::new();
    for (i, &m) in means.iter().enumerate() {
        if let Err(msg) = family.check_mean(m) {
            issues.push(format!("{key}.means[{i}]"), msg);
            continue;
        }
        let sigma = match family {
            Family::Gaussian => match scales.and_then(|s| s.get(i).copied()).or(scale) {
                Some(s) if s > 0.0 && s.is_finite() => s,
                Some(s) => {
                    issues.push(format!("{key}.scales[{i}]"), format!("sigma = {s} must be positive"));
                    continue;
                }
                None => {
                    issues.push(format!("{key}.scale"), "gaussian arms need `scale` or `scales`");
                    continue;
                }
            },
            _ => 1.0,
        };
        match ArmModel::new(family, m, sigma) {
            Ok(a) => arms.push(a),
            Err(e) => issues.push(format!("{key}.means[{i}]"), e.to_string()),
        }
    }
    arms
}

fn from_raw(raw: RawConfig) -> Result<ExperimentConfig> {
    let mut issues = Issues(Vec::new());
    if raw.horizon < 1 {
        issues.push("horizon", "must be >= 1");
    }
    if raw.replications < 1 {
        issues.push("replications", "must be >= 1");
    }
    let checkpoints = match raw.checkpoints {
        None => Checkpoints::default(),
        Some(RawCheckpoints::Count(n)) => Checkpoints::Log(n),
        Some(RawCheckpoints::List(v)) => Checkpoints::List(v),
        Some(RawCheckpoints::Name(n)) => match n.as_str() {
            "log" => Checkpoints::Log(DEFAULT_CHECKPOINTS),
            "all" => Checkpoints::All,
            other => {
                issues.push("checkpoints", format!("{other:?} is not \"log\", \"all\", a count or a list"));
                Checkpoints::default()
            }
        },
    };

    let env_raw = &raw.environment;
    let family = match env_raw.family.parse::<Family>() {
        Ok(f) => Some(f),
        Err(_) => {
            issues.push(
                "environment.family",
                format!("unknown family {:?} (bernoulli, gaussian, poisson, exponential)", env_raw.family),
            );
            None
        }
    };
    let mut phases = Vec::new();
    if let Some(family) = family {
        match (&env_raw.means, &env_raw.phases) {
            (Some(_), Some(_)) => issues.push("environment", "give either `means` or `phases`, not both"),
            (None, None) => issues.push("environment", "missing `means` or `phases`"),
            (Some(means), None) => {
                let arms = phase_arms(
                    family,
                    "environment",
                    means,
                    env_raw.scale,
                    env_raw.scales.as_deref(),
                    &mut issues,
                );
                phases.push(Phase { start: 1, arms });
            }
            (None, Some(raw_phases)) => {
                if env_raw.scales.is_some() {
                    issues.push("environment.scales", "per-arm scales belong to each phase");
                }
                if raw_phases.is_empty() {
                    issues.push("environment.phases", "at least one phase is required");
                }
                let k = raw_phases.first().map_or(0, |p| p.means.len());
                for (i, p) in raw_phases.iter().enumerate() {
                    let key = format!("environment.phases[{i}]");
                    if i == 0 && p.start != 1 {
                        issues.push(format!("{key}.start"), format!("first phase must start at 1, got {}", p.start));
                    }
                    if i > 0 && p.start <= raw_phases[i - 1].start {
                        issues.push(format!("{key}.start"), format!("{} is not after the previous start", p.start));
                    }
                    if p.start > raw.horizon {
                        issues.push(
                            format!("{key}.start"),
                            format!("breakpoint {} outside [1, horizon = {}]", p.start, raw.horizon),
                        );
                    }
                    if p.means.len() != k {
                        issues.push(format!("{key}.means"), format!("has {} arms, expected {k}", p.means.len()));
                    }
                    let arms = phase_arms(
                        family,
                        &key,
                        &p.means,
                        p.scale.or(env_raw.scale),
                        p.scales.as_deref(),
                        &mut issues,
                    );
                    phases.push(Phase { start: p.start, arms });
                }
            }
        }
    }
    let k = match (&env_raw.means, &env_raw.phases) {
        (Some(m), None) => m.len(),
        (None, Some(ph)) => ph.first().map_or(0, |p| p.means.len()),
        _ => 0,
    };
    if family.is_some() && !phases.is_empty() && k < 2 {
        issues.push("environment.means", format!("need at least 2 arms, got {k}"));
    }

    for (i, p) in raw.policies.iter().enumerate() {
        let key = format!("policies[{i}]");
        if !POLICY_NAMES.contains(&p.name.as_str()) {
            issues.push(format!("{key}.name"), format!("unknown policy {:?}", p.name));
            continue;
        }
        if let Some(tau) = p.tau {
            if k >= 2 && tau < k as u64 {
                issues.push(format!("{key}.tau"), format!("tau = {tau} must be >= number of arms {k}"));
            }
        }
        if let Some(g) = p.gamma {
            if !(g > 0.0 && g < 1.0) {
                issues.push(format!("{key}.gamma"), format!("gamma = {g} must lie in (0, 1)"));
            }
        }
        if let Some(arm) = p.arm {
            if k >= 2 && arm >= k {
                issues.push(format!("{key}.arm"), format!("arm {arm} outside [0, {k})"));
            }
        }
        if let Some(f) = family {
            if matches!(p.name.as_str(), "ts" | "sw-ts" | "dts") && !matches!(f, Family::Bernoulli | Family::Gaussian) {
                issues.push(format!("{key}.name"), format!("{} does not support {} arms", p.name, f.name()));
            }
        }
    }

    if !issues.0.is_empty() {
        return Err(Error::Validation(issues.0));
    }
    let environment = EnvironmentSpec::new(raw.horizon, phases).map_err(|e| {
        Error::Validation(vec![ValidationIssue {
            key: "environment".into(),
            message: e.to_string(),
        }])
    })?;
    let cfg = ExperimentConfig {
        environment,
        policies: raw.policies,
        replications: raw.replications,
        base_seed: raw.seed,
        record_trajectories: raw.record_trajectories,
        invariant_checks: raw.invariant_checks,
        checkpoints,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Renders `config` in the file format; parsing the result gives back the
/// same config.
pub fn to_toml(config: &ExperimentConfig) -> String {
    let env = &config.environment;
    let gaussian = env.family() == Family::Gaussian;
    let raw = RawConfig {
        horizon: env.horizon(),
        replications: config.replications,
        seed: config.base_seed,
        record_trajectories: config.record_trajectories,
        invariant_checks: config.invariant_checks,
        checkpoints: Some(match &config.checkpoints {
            Checkpoints::Log(n) => RawCheckpoints::Count(*n),
            Checkpoints::All => RawCheckpoints::Name("all".into()),
            Checkpoints::List(v) => RawCheckpoints::List(v.clone()),
        }),
        environment: RawEnvironment {
            family: env.family().name().to_string(),
            means: None,
            scale: None,
            scales: None,
            phases: Some(
                env.phases()
                    .iter()
                    .map(|p| RawPhase {
                        start: p.start,
                        means: p.arms.iter().map(|a| a.mean).collect(),
                        scale: None,
                        scales: gaussian.then(|| p.arms.iter().map(|a| a.scale).collect()),
                    })
                    .collect(),
            ),
        },
        policies: config.policies.clone(),
    };
    toml::to_string(&raw).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::presets::{expand, PRESETS};

    fn issues(text: &str) -> Vec<ValidationIssue> {
        match parse_config_str(text) {
            Err(Error::Validation(v)) => v,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_stationary() {
        let cfg = parse_config_str(
            r#"
            horizon = 100
            [environment]
            family = "bernoulli"
            means = [0.2, 0.6]
            [[policies]]
            name = "lb-sda"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.environment.num_breakpoints(), 0);
        assert_eq!(cfg.replications, 1);
        assert_eq!(cfg.checkpoints, Checkpoints::Log(DEFAULT_CHECKPOINTS));
    }

    #[test]
    fn mean_out_of_support() {
        let v = issues(
            r#"
            horizon = 100
            [environment]
            family = "bernoulli"
            means = [1.3, 0.6]
            [[policies]]
            name = "lb-sda"
            "#,
        );
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].key, "environment.means[0]");
        assert!(v[0].message.contains("[0,1]"), "{}", v[0].message);
    }

    #[test]
    fn every_issue_is_reported() {
        let v = issues(
            r#"
            horizon = 100
            [environment]
            family = "gaussian"
            scale = 0.5
            [[environment.phases]]
            start = 1
            means = [0.0, 1.0, 0.5]
            [[environment.phases]]
            start = 150
            means = [1.0, 0.0, 0.5]
            [[policies]]
            name = "lb-sda-xl"
            [[policies]]
            name = "sw-lb-sda"
            tau = 2
            "#,
        );
        let keys: Vec<&str> = v.iter().map(|i| i.key.as_str()).collect();
        assert_eq!(keys, ["environment.phases[1].start", "policies[0].name", "policies[1].tau"]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            parse_config_str("horizon = 5\nfoo = 1\n[environment]\nfamily = \"bernoulli\"\nmeans = [0.1, 0.2]\npolicies = []\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn presets_round_trip() {
        for p in PRESETS {
            let cfg = expand(p.name, Some(5000), Some(7), Some(3)).unwrap();
            let text = to_toml(&cfg);
            let back = parse_config_str(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", p.name));
            assert_eq!(back, cfg, "{}", p.name);
        }
    }

    #[test]
    fn checkpoint_forms() {
        let base = "horizon = 10\n[environment]\nfamily = \"poisson\"\nmeans = [1.0, 2.0]\n[[policies]]\nname = \"ucb1\"\n";
        let cfg = parse_config_str(&format!("checkpoints = [1, 5]\n{base}")).unwrap();
        assert_eq!(cfg.checkpoints, Checkpoints::List(vec![1, 5]));
        let cfg = parse_config_str(&format!("checkpoints = \"all\"\n{base}")).unwrap();
        assert_eq!(cfg.checkpoints, Checkpoints::All);
        let cfg = parse_config_str(&format!("checkpoints = 20\n{base}")).unwrap();
        assert_eq!(cfg.checkpoints, Checkpoints::Log(20));
        assert_eq!(issues(&format!("checkpoints = \"some\"\n{base}"))[0].key, "checkpoints");
    }
}
