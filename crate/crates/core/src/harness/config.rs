use std::path::Path;

use crate::env::{default_lane_rows, SpeedPreset, WorldConfig};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::planner::MctsConfig;

pub const CONFIG_KEYS: &[&str] = &[
    "speed",
    "grid_h",
    "grid_w",
    "level",
    "spawn_base_rate",
    "lane_rows",
    "goal_speed",
    "goal_size",
    "agent_speed",
    "max_steps",
    "master_seed",
    "warmup_steps",
    "n_rollouts",
    "rollout_length",
    "temperature",
    "c_puct",
    "prior_kappa",
    "shaping_beta",
    "death_value",
    "goal_value",
    "model",
    "strict_presets",
];

const PRESET_ROLLOUT_LENGTHS: [usize; 4] = [1, 3, 5, 10];

/// One `key = value` setting. `line` is 1-based for file input and 0 for
/// command-line overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigEntry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl ConfigEntry {
    pub fn flag(key: impl Into<String>, value: impl Into<String>) -> Self {
        Self {
            line: 0,
            key: key.into(),
            value: value.into(),
        }
    }

    fn error(&self, msg: impl std::fmt::Display) -> Error {
        if self.line == 0 {
            Error::Argument(format!("--{}: {msg}", self.key.replace('_', "-")))
        } else {
            Error::Parse {
                line: self.line,
                msg: format!("{}: {msg}", self.key),
            }
        }
    }

    fn parse<T: std::str::FromStr>(&self) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.value
            .parse()
            .map_err(|e| self.error(format!("bad value {:?} ({e})", self.value)))
    }
}

/// Splits config text into entries. `#` starts a comment; blank lines are
/// skipped; unknown keys are rejected.
pub fn parse_config_str(text: &str) -> Result<Vec<ConfigEntry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected `key = value`, got {line:?}"),
            });
        };
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("unknown key {key:?}"),
            });
        }
        out.push(ConfigEntry {
            line: i + 1,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub world: WorldConfig,
    pub mcts: MctsConfig,
    pub model: ModelSpec,
    pub strict_presets: bool,
    /// Settings outside the reference presets, filled in strict mode.
    pub warnings: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            world: WorldConfig::default(),
            mcts: MctsConfig::default(),
            model: ModelSpec::Oracle,
            strict_presets: false,
            warnings: Vec::new(),
        }
    }
}

fn parse_bool(e: &ConfigEntry) -> Result<bool> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(e.error(format!("expected a boolean, got {:?}", e.value))),
    }
}

fn parse_rows(e: &ConfigEntry) -> Result<Vec<usize>> {
    if e.value.is_empty() || e.value == "none" {
        return Ok(Vec::new());
    }
    e.value
        .split(',')
        .map(|r| {
            r.trim()
                .parse()
                .map_err(|_| e.error(format!("bad lane row {r:?}")))
        })
        .collect()
}

impl RunConfig {
    /// Builds a configuration from entries applied in order, later entries
    /// winning. A `speed` preset is applied before any explicit
    /// `agent_speed`/`max_steps`, and lane rows follow `grid_h` unless set.
    pub fn from_entries(entries: &[ConfigEntry]) -> Result<Self> {
        let mut last: Vec<&ConfigEntry> = Vec::new();
        for e in entries {
            if !CONFIG_KEYS.contains(&e.key.as_str()) {
                return Err(e.error("unknown key"));
            }
            last.retain(|p| p.key != e.key);
            last.push(e);
        }
        last.sort_by_key(|e| (e.key != "speed", CONFIG_KEYS.iter().position(|k| *k == e.key)));

        let mut cfg = RunConfig::default();
        let mut lanes_set = false;
        for e in &last {
            let w = &mut cfg.world;
            let m = &mut cfg.mcts;
            match e.key.as_str() {
                "speed" => w.apply_speed(e.parse::<SpeedPreset>()?),
                "grid_h" => w.grid_h = e.parse()?,
                "grid_w" => w.grid_w = e.parse()?,
                "level" => w.level = e.parse()?,
                "spawn_base_rate" => w.spawn_base_rate = e.parse()?,
                "lane_rows" => {
                    w.lane_rows = parse_rows(e)?;
                    lanes_set = true;
                }
                "goal_speed" => w.goal_speed = e.parse()?,
                "goal_size" => w.goal_size = e.parse()?,
                "agent_speed" => w.agent_speed = e.parse()?,
                "max_steps" => w.max_steps = e.parse()?,
                "master_seed" => w.master_seed = e.parse()?,
                "warmup_steps" => w.warmup_steps = e.parse()?,
                "n_rollouts" => m.n_rollouts = e.parse()?,
                "rollout_length" => m.rollout_length = e.parse()?,
                "temperature" => m.temperature = e.parse()?,
                "c_puct" => m.c_puct = e.parse()?,
                "prior_kappa" => m.prior_kappa = e.parse()?,
                "shaping_beta" => m.shaping_beta = e.parse()?,
                "death_value" => m.death_value = e.parse()?,
                "goal_value" => m.goal_value = e.parse()?,
                "model" => cfg.model = e.parse()?,
                "strict_presets" => cfg.strict_presets = parse_bool(e)?,
                _ => unreachable!("key list checked above"),
            }
        }
        if !lanes_set {
            cfg.world.lane_rows = default_lane_rows(cfg.world.grid_h);
        }
        cfg.world.validate()?;
        cfg.mcts.validate()?;
        if cfg.strict_presets {
            cfg.warnings = cfg.preset_deviations();
        }
        Ok(cfg)
    }

    fn preset_deviations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let w = &self.world;
        if (w.grid_h, w.grid_w) != (48, 48) {
            out.push(format!("grid {}x{} differs from the reference 48x48", w.grid_h, w.grid_w));
        }
        if w.level != 6.0 {
            out.push(format!("level {} differs from the reference 6", w.level));
        }
        match w.speed_preset() {
            Some(p) if p.max_steps() == w.max_steps => {}
            _ => out.push(format!(
                "agent_speed {} with max_steps {} is not a reference speed preset",
                w.agent_speed, w.max_steps
            )),
        }
        if self.mcts.n_rollouts != 100 {
            out.push(format!("n_rollouts {} differs from the reference 100", self.mcts.n_rollouts));
        }
        if !PRESET_ROLLOUT_LENGTHS.contains(&self.mcts.rollout_length) {
            out.push(format!(
                "rollout_length {} is not one of the reference lengths {PRESET_ROLLOUT_LENGTHS:?}",
                self.mcts.rollout_length
            ));
        }
        out
    }
}

/// Reads an optional config file, then applies `overrides` on top.
pub fn load_config(path: Option<&Path>, overrides: &[ConfigEntry]) -> Result<RunConfig> {
    let mut entries = match path {
        Some(p) => parse_config_str(&std::fs::read_to_string(p)?)?,
        None => Vec::new(),
    };
    entries.extend_from_slice(overrides);
    RunConfig::from_entries(&entries)
}
