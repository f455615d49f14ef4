use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_WARMUP_STEPS: u32 = 48;

/// Direction of travel for every obstacle in a lane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::LeftToRight => 1.0,
            Direction::RightToLeft => -1.0,
        }
    }
}

/// Obstacle family: palette value plus length and speed distributions.
///
/// Speed is drawn uniformly from `mean_speed ± speed_jitter`; length from
/// `mean_length ± length_jitter`, rounded and clamped to at least one pixel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleClass {
    pub class_id: u8,
    pub mean_speed: f64,
    pub speed_jitter: f64,
    pub mean_length: f64,
    pub length_jitter: f64,
}

impl ObstacleClass {
    pub const fn new(
        class_id: u8,
        mean_length: f64,
        length_jitter: f64,
        mean_speed: f64,
        speed_jitter: f64,
    ) -> Self {
        Self {
            class_id,
            mean_speed,
            speed_jitter,
            mean_length,
            length_jitter,
        }
    }

    pub fn default_table() -> Vec<ObstacleClass> {
        vec![
            ObstacleClass::new(1, 1.0, 0.0, 0.5, 0.1),
            ObstacleClass::new(2, 2.0, 1.0, 0.5, 0.1),
            ObstacleClass::new(3, 3.0, 1.0, 1.0, 0.2),
            ObstacleClass::new(4, 4.0, 1.0, 1.0, 0.2),
            ObstacleClass::new(5, 6.0, 2.0, 1.5, 0.3),
        ]
    }
}

/// Agent speed relative to the goal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpeedPreset {
    /// Same speed as the goal: 0.5 px/step, 407 steps.
    Same,
    /// Twice the goal speed: 1.0 px/step, 203 steps.
    Double,
}

impl SpeedPreset {
    pub fn agent_speed(self) -> f64 {
        match self {
            SpeedPreset::Same => 0.5,
            SpeedPreset::Double => 1.0,
        }
    }

    pub fn max_steps(self) -> u32 {
        match self {
            SpeedPreset::Same => 407,
            SpeedPreset::Double => 203,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpeedPreset::Same => "1x",
            SpeedPreset::Double => "2x",
        }
    }
}

impl fmt::Display for SpeedPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SpeedPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1x" | "1" | "same" => Ok(SpeedPreset::Same),
            "2x" | "2" | "double" => Ok(SpeedPreset::Double),
            other => Err(Error::Argument(format!(
                "unknown speed preset {other:?} (expected 1x or 2x)"
            ))),
        }
    }
}

/// Lanes on every other row, starting at row 2 and leaving the bottom
/// three rows clear. For a 48-row grid: rows 2, 4, ..., 44.
pub fn default_lane_rows(grid_h: usize) -> Vec<usize> {
    if grid_h < 7 {
        return Vec::new();
    }
    (2..=grid_h - 4).step_by(2).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub grid_h: usize,
    pub grid_w: usize,
    pub level: f64,
    /// Expected arrivals per lane per step per unit of `level`.
    pub spawn_base_rate: f64,
    pub lane_rows: Vec<usize>,
    pub obstacle_classes: Vec<ObstacleClass>,
    pub goal_speed: f64,
    pub goal_size: usize,
    pub agent_speed: f64,
    pub max_steps: u32,
    pub master_seed: u64,
    /// World steps run before `t = 0` so lanes start populated.
    pub warmup_steps: u32,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self::with_speed(SpeedPreset::Double)
    }
}

impl WorldConfig {
    pub fn with_speed(speed: SpeedPreset) -> Self {
        Self {
            grid_h: 48,
            grid_w: 48,
            level: 6.0,
            spawn_base_rate: 0.01,
            lane_rows: default_lane_rows(48),
            obstacle_classes: ObstacleClass::default_table(),
            goal_speed: 0.5,
            goal_size: 2,
            agent_speed: speed.agent_speed(),
            max_steps: speed.max_steps(),
            master_seed: 0,
            warmup_steps: DEFAULT_WARMUP_STEPS,
        }
    }

    pub fn apply_speed(&mut self, speed: SpeedPreset) {
        self.agent_speed = speed.agent_speed();
        self.max_steps = speed.max_steps();
    }

    /// Preset matching the current agent speed, if any.
    pub fn speed_preset(&self) -> Option<SpeedPreset> {
        [SpeedPreset::Same, SpeedPreset::Double]
            .into_iter()
            .find(|p| p.agent_speed() == self.agent_speed)
    }

    /// Per-lane, per-step Poisson rate.
    pub fn spawn_rate(&self) -> f64 {
        self.level * self.spawn_base_rate
    }

    pub fn num_cells(&self) -> usize {
        self.grid_h * self.grid_w
    }

    pub fn is_lane_row(&self, row: usize) -> bool {
        self.lane_rows.contains(&row)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.grid_h == 0 || self.grid_w == 0 {
            return bad(format!(
                "grid_h and grid_w must be > 0 (got {}x{})",
                self.grid_h, self.grid_w
            ));
        }
        if self.goal_size == 0 || self.goal_size > self.grid_h.min(self.grid_w) {
            return bad(format!(
                "goal_size must be in 1..={} (got {})",
                self.grid_h.min(self.grid_w),
                self.goal_size
            ));
        }
        if !(self.agent_speed.is_finite() && self.agent_speed > 0.0) {
            return bad(format!("agent_speed must be > 0 (got {})", self.agent_speed));
        }
        if !(self.goal_speed.is_finite() && self.goal_speed >= 0.0) {
            return bad(format!("goal_speed must be >= 0 (got {})", self.goal_speed));
        }
        if self.max_steps == 0 {
            return bad("max_steps must be > 0".into());
        }
        if !(self.level.is_finite() && self.level >= 0.0) {
            return bad(format!("level must be >= 0 (got {})", self.level));
        }
        if !(self.spawn_base_rate.is_finite() && self.spawn_base_rate >= 0.0) {
            return bad(format!(
                "spawn_base_rate must be >= 0 (got {})",
                self.spawn_base_rate
            ));
        }
        for (i, row) in self.lane_rows.iter().enumerate() {
            if *row >= self.grid_h {
                return bad(format!("lane row {row} outside [0, {})", self.grid_h));
            }
            if self.lane_rows[..i].contains(row) {
                return bad(format!("lane row {row} listed twice"));
            }
        }
        if !self.lane_rows.is_empty() && self.obstacle_classes.is_empty() {
            return bad("lanes need at least one obstacle class".into());
        }
        for class in &self.obstacle_classes {
            if !(1..=5).contains(&class.class_id) {
                return bad(format!("class_id {} outside 1..=5", class.class_id));
            }
            if !(class.mean_speed > 0.0 && class.speed_jitter >= 0.0)
                || class.speed_jitter >= class.mean_speed
            {
                return bad(format!(
                    "class {}: need mean_speed > speed_jitter >= 0",
                    class.class_id
                ));
            }
            if !(class.mean_length >= 1.0 && class.length_jitter >= 0.0) {
                return bad(format!(
                    "class {}: need mean_length >= 1 and length_jitter >= 0",
                    class.class_id
                ));
            }
        }
        Ok(())
    }
}
