//! Run configuration: JSON file, strict keys, every section optional.

use std::path::{Path, PathBuf};

use drfcheck_core::causal::FirstOutcomeDependence;
use drfcheck_core::spacetime::{CausalRequirement, Event, DEFAULT_GROUP_INDEX};
use drfcheck_core::stats::SamplingMode;
use drfcheck_core::{AngleSettings, NoiseModel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable naming the directory searched for `drfcheck.json`
/// when no `--config` is given.
pub const CONFIG_DIR_ENV: &str = "DRFCHECK_CONFIG_DIR";
pub const DEFAULT_CONFIG_NAME: &str = "drfcheck.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub noise: NoiseModel,
    pub sampling: SamplingConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<AngleSettings>,
    /// Functional definition file for `bound`; the bundled VBC file otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional: Option<PathBuf>,
    pub first_outcome: FirstOutcomeDependence,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacetime: Option<Scenario>,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            noise: NoiseModel::IDEAL,
            sampling: SamplingConfig::default(),
            angles: None,
            functional: None,
            first_outcome: FirstOutcomeDependence::OwnInput,
            spacetime: None,
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub rounds: u64,
    pub seed: u64,
    pub mode: SamplingMode,
    pub shards: u32,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            rounds: 1_000_000,
            seed: 1,
            mode: SamplingMode::Iid,
            shards: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fiber {
    pub label: String,
    pub length_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_group_index")]
    pub group_index: f64,
    #[serde(default)]
    pub fibers: Vec<Fiber>,
    #[serde(default)]
    pub events: Vec<Event>,
    #[serde(default)]
    pub requirements: Vec<CausalRequirement>,
}

fn default_group_index() -> f64 {
    DEFAULT_GROUP_INDEX
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| CliError::config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
            .map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
    }

    /// Explicit path, else `$DRFCHECK_CONFIG_DIR/drfcheck.json` if present,
    /// else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, CliError> {
        if let Some(path) = explicit {
            return Self::load(path);
        }
        if let Some(dir) = std::env::var_os(CONFIG_DIR_ENV) {
            let path = Path::new(&dir).join(DEFAULT_CONFIG_NAME);
            if path.is_file() {
                return Self::load(&path);
            }
        }
        Ok(Self::default())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.noise.validate().map_err(CliError::as_config)?;
        if let Some(angles) = &self.angles {
            angles.validate().map_err(CliError::as_config)?;
        }
        if self.sampling.rounds == 0 {
            return Err(CliError::config("sampling.rounds must be positive"));
        }
        if self.sampling.shards == 0 {
            return Err(CliError::config("sampling.shards must be positive"));
        }
        if self.sampling.mode == SamplingMode::PerSetting && self.sampling.shards != 1 {
            return Err(CliError::config("per_setting sampling requires shards = 1"));
        }
        if let Some(s) = &self.spacetime {
            if !(s.group_index >= 1.0 && s.group_index.is_finite()) {
                return Err(CliError::config(format!(
                    "group_index {} must be at least 1",
                    s.group_index
                )));
            }
            for f in &s.fibers {
                if !(f.length_m >= 0.0 && f.length_m.is_finite()) {
                    return Err(CliError::config(format!(
                        "fiber {:?} has invalid length",
                        f.label
                    )));
                }
            }
            for e in &s.events {
                e.validate().map_err(CliError::as_config)?;
            }
        }
        Ok(())
    }

    pub fn angles(&self) -> AngleSettings {
        self.angles.unwrap_or(AngleSettings::CANONICAL)
    }
}

/// Parameter a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKey {
    Visibility,
    WernerP,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub key: SweepKey,
    pub values: Vec<f64>,
}

impl Sweep {
    /// Parses `KEY=A:B:STEP`; both endpoints are included.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::config(format!("bad sweep {spec:?}: {why}"));
        let (key, range) = spec
            .split_once('=')
            .ok_or_else(|| bad("expected KEY=A:B:STEP"))?;
        let key = match key.trim() {
            "visibility" => SweepKey::Visibility,
            "werner_p" => SweepKey::WernerP,
            other => {
                return Err(bad(&format!(
                    "unknown key {other:?}, expected visibility or werner_p"
                )))
            }
        };
        let parts: Vec<f64> = range
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("A, B and STEP must be numbers"))?;
        let [a, b, step] = parts[..] else {
            return Err(bad("expected exactly three numbers"));
        };
        if !(step > 0.0 && step.is_finite()) || !(a.is_finite() && b.is_finite()) || b < a {
            return Err(bad("need finite A <= B and STEP > 0"));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        let mut values: Vec<f64> = (0..=n).map(|k| a + k as f64 * step).collect();
        let last = *values.last().unwrap();
        if (b - last).abs() <= 1e-9 * step.max(1.0) {
            *values.last_mut().unwrap() = b;
        } else {
            values.push(b);
        }
        Ok(Self { key, values })
    }

    pub fn apply(&self, noise: &mut NoiseModel, value: f64) {
        match self.key {
            SweepKey::Visibility => noise.visibility = value,
            SweepKey::WernerP => noise.werner_p = value,
        }
    }
}
