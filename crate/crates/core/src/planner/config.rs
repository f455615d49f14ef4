use serde::{Deserialize, Serialize};

use crate::env::{WorldConfig, DIED_REWARD, GOAL_REWARD};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    pub n_rollouts: usize,
    /// Tree depth, and the number of predicted frames requested per decision.
    pub rollout_length: usize,
    /// Final-move temperature: `π(a) ∝ N(a)^(1/τ)`.
    pub temperature: f64,
    pub c_puct: f64,
    /// Concentration of the goal-direction prior.
    pub prior_kappa: f64,
    pub death_value: f64,
    pub goal_value: f64,
    /// Weight of the `-dist/diag` leaf shaping term, 0 disables it.
    pub shaping_beta: f64,
}

impl Default for MctsConfig {
    fn default() -> Self {
        Self {
            n_rollouts: 100,
            rollout_length: 3,
            temperature: 0.01,
            c_puct: 1.4,
            prior_kappa: 2.0,
            death_value: DIED_REWARD,
            goal_value: GOAL_REWARD,
            shaping_beta: 0.0,
        }
    }
}

impl MctsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_rollouts == 0 {
            return bad("n_rollouts must be >= 1".into());
        }
        if self.rollout_length == 0 {
            return bad("rollout_length must be >= 1".into());
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return bad(format!("temperature must be > 0 (got {})", self.temperature));
        }
        if !(self.c_puct.is_finite() && self.c_puct >= 0.0) {
            return bad(format!("c_puct must be >= 0 (got {})", self.c_puct));
        }
        if !(self.prior_kappa.is_finite() && self.prior_kappa >= 0.0) {
            return bad(format!("prior_kappa must be >= 0 (got {})", self.prior_kappa));
        }
        if !(self.shaping_beta.is_finite() && self.shaping_beta >= 0.0) {
            return bad(format!("shaping_beta must be >= 0 (got {})", self.shaping_beta));
        }
        if !(self.death_value <= 0.0 && self.goal_value >= 0.0) {
            return bad("need death_value <= 0 <= goal_value".into());
        }
        Ok(())
    }
}

/// Agent motion parameters the search simulates with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics {
    pub speed: f64,
    pub goal_size: usize,
}

impl From<&WorldConfig> for Kinematics {
    fn from(cfg: &WorldConfig) -> Self {
        Self {
            speed: cfg.agent_speed,
            goal_size: cfg.goal_size,
        }
    }
}
