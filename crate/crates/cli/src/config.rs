//! JSON experiment configs.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use consbandit::environments::{Adversary, RewardTable};
use consbandit::harness::{DeltaSpec, EnvKind, ExperimentConfig, Sweep};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum DeltaField {
    Value(f64),
    Symbolic(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    means: Vec<f64>,
    alpha: OneOrMany<f64>,
    n: OneOrMany<u64>,
    delta: DeltaField,
    policies: Vec<String>,
    replications: u64,
    #[serde(default)]
    seed_base: u64,
    #[serde(default = "default_noise")]
    noise: String,
    #[serde(default = "default_psi")]
    psi: String,
    /// "stochastic", a builtin adversary name, or "table:<csv path>".
    #[serde(default = "default_environment")]
    environment: String,
    #[serde(default)]
    expectation_mode: bool,
}

fn default_noise() -> String {
    "gaussian".into()
}

fn default_psi() -> String {
    "refined".into()
}

fn default_environment() -> String {
    "stochastic".into()
}

fn field_error(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {message}"))
}

/// Reads a config file, applies `key=value` overrides, and validates it.
/// Table paths are resolved relative to the config file.
pub fn parse_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_str(&text, overrides, &base)
}

pub fn parse_config_str(text: &str, overrides: &[String], base_dir: &Path) -> Result<ExperimentConfig, CliError> {
    let mut value: Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config is not valid JSON: {e}")))?;
    apply_overrides(&mut value, overrides)?;
    let file: ConfigFile = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Config(inner.to_string())
        } else {
            field_error(&path, inner)
        }
    })?;
    let config = convert(file, base_dir)?;
    config.validate().map_err(CliError::from)?;
    Ok(config)
}

fn apply_overrides(value: &mut Value, overrides: &[String]) -> Result<(), CliError> {
    let Value::Object(map) = value else {
        return Err(CliError::Config("config must be a JSON object".into()));
    };
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override {item:?} is not key=value")))?;
        let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        map.insert(key.trim().to_string(), parsed);
    }
    Ok(())
}

fn convert(file: ConfigFile, base_dir: &Path) -> Result<ExperimentConfig, CliError> {
    let (alpha, alpha_sweep) = match file.alpha {
        OneOrMany::One(a) => (a, None),
        OneOrMany::Many(v) => (*v.first().ok_or_else(|| field_error("alpha", "empty list"))?, Some(v)),
    };
    let (horizon, n_sweep) = match file.n {
        OneOrMany::One(n) => (n, None),
        OneOrMany::Many(v) => (*v.first().ok_or_else(|| field_error("n", "empty list"))?, Some(v)),
    };
    let sweep = match (alpha_sweep, n_sweep) {
        (Some(_), Some(_)) => return Err(field_error("alpha", "only one of alpha and n may be a list")),
        (Some(a), None) => Sweep::Alpha(a),
        (None, Some(n)) => Sweep::Horizon(n),
        (None, None) => Sweep::None,
    };
    let delta = match file.delta {
        DeltaField::Value(d) => DeltaSpec::Fixed(d),
        DeltaField::Symbolic(s) if s.replace(' ', "") == "1/n" => DeltaSpec::InverseHorizon,
        DeltaField::Symbolic(s) => return Err(field_error("delta", format!("expected a number or \"1/n\", got {s:?}"))),
    };
    let policies = file
        .policies
        .iter()
        .map(|p| p.parse().map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    Ok(ExperimentConfig {
        means: file.means,
        alpha,
        horizon,
        delta,
        sweep,
        policies,
        replications: file.replications,
        seed_base: file.seed_base,
        noise: file.noise.parse()?,
        psi: file.psi.parse()?,
        environment: environment(&file.environment, base_dir)?,
        expectation_mode: file.expectation_mode,
    })
}

fn environment(spec: &str, base_dir: &Path) -> Result<EnvKind, CliError> {
    if spec == "stochastic" {
        return Ok(EnvKind::Stochastic);
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let full: PathBuf = base_dir.join(path);
        let file = fs::File::open(&full)
            .map_err(|e| field_error("environment", format!("cannot open {}: {e}", full.display())))?;
        let table = RewardTable::from_csv(file)?;
        return Ok(EnvKind::Table {
            path: path.to_string(),
            table: Arc::new(table),
        });
    }
    spec.parse::<Adversary>()
        .map(EnvKind::Adversary)
        .map_err(|_| {
            field_error(
                "environment",
                format!("{spec:?} is not \"stochastic\", \"table:<path>\" or one of constant, drift, stochastic-disguise"),
            )
        })
}

/// Serializes a config so that parsing the output gives the same config.
pub fn emit_config(config: &ExperimentConfig) -> String {
    let (alpha, n) = match &config.sweep {
        Sweep::None => (OneOrMany::One(config.alpha), OneOrMany::One(config.horizon)),
        Sweep::Alpha(v) => (OneOrMany::Many(v.clone()), OneOrMany::One(config.horizon)),
        Sweep::Horizon(v) => (OneOrMany::One(config.alpha), OneOrMany::Many(v.clone())),
    };
    let file = ConfigFile {
        means: config.means.clone(),
        alpha,
        n,
        delta: match config.delta {
            DeltaSpec::Fixed(d) => DeltaField::Value(d),
            DeltaSpec::InverseHorizon => DeltaField::Symbolic("1/n".into()),
        },
        policies: config.policies.iter().map(|p| p.to_string()).collect(),
        replications: config.replications,
        seed_base: config.seed_base,
        noise: config.noise.name().into(),
        psi: config.psi.to_string(),
        environment: match &config.environment {
            EnvKind::Stochastic => "stochastic".into(),
            EnvKind::Adversary(a) => a.to_string(),
            EnvKind::Table { path, .. } => format!("table:{path}"),
        },
        expectation_mode: config.expectation_mode,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("config serializes");
    text.push('\n');
    text
}
