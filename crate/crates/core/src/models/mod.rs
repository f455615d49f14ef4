//! Forward models.
//!
//! Every model produces a [`PredictedRollout`]: `k` future obstacle grids and
//! goal estimates for steps `t+1 ..= t+k`. The planner consumes one rollout
//! per decision and shares it across all of its search iterations, which is
//! sound because the world evolves independently of the agent.
//!
//! Two families exist and the type system keeps them apart:
//!
//! - [`ObservationModel`]s see only the last four rendered frames
//!   ([`History`]): [`FrozenModel`] and [`VelocityModel`].
//! - State models read the hidden [`WorldState`]: [`oracle_predict`] and
//!   [`NoisySampler`], a corrupted-oracle surrogate for a learned generator.

mod error_map;
mod frozen;
mod history;
mod noisy;
mod oracle;
mod spec;
mod velocity;

pub use error_map::{prediction_error, ErrorMap};
pub use frozen::{frozen_predict, FrozenModel};
pub use history::{History, HISTORY_LEN};
pub use noisy::{noisy_sample_predict, NoiseParams, NoisySampler};
pub use oracle::oracle_predict;
pub use spec::{Forecaster, ModelSpec};
pub use velocity::{estimate_row_shift, velocity_predict, VelocityModel, MAX_SHIFT};

use crate::env::{goal_footprint_origin, Frame, WorldState};
use crate::error::{Error, Result};

/// Predicted obstacle occupancy and goal center for one future step.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictedFrame {
    height: usize,
    width: usize,
    occupancy: Vec<bool>,
    goal_estimate: Option<(f64, f64)>,
}

impl PredictedFrame {
    pub fn new(
        height: usize,
        width: usize,
        occupancy: Vec<bool>,
        goal_estimate: Option<(f64, f64)>,
    ) -> Result<Self> {
        if occupancy.len() != height * width {
            return Err(Error::Argument(format!(
                "occupancy has {} cells for a {height}x{width} grid",
                occupancy.len()
            )));
        }
        if let Some((x, y)) = goal_estimate {
            if !(x >= 0.0 && y >= 0.0 && x <= (width - 1) as f64 && y <= (height - 1) as f64) {
                return Err(Error::Argument(format!(
                    "goal estimate ({x}, {y}) outside the grid"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            occupancy,
            goal_estimate,
        })
    }

    /// Obstacle pixels and goal centroid of a true frame.
    pub fn from_frame(frame: &Frame) -> Self {
        Self {
            height: frame.height(),
            width: frame.width(),
            occupancy: frame.obstacle_mask(),
            goal_estimate: frame.goal_center(),
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn goal_estimate(&self) -> Option<(f64, f64)> {
        self.goal_estimate
    }

    /// Occupancy at a signed pixel; outside the grid is free.
    #[inline]
    pub fn occupied(&self, row: i64, col: i64) -> bool {
        if row < 0 || col < 0 || row >= self.height as i64 || col >= self.width as i64 {
            return false;
        }
        self.occupancy[row as usize * self.width + col as usize]
    }

    /// Whether `(row, col)` lies in the `goal_size` footprint around the
    /// goal estimate.
    pub fn goal_contains(&self, row: i64, col: i64, goal_size: usize) -> bool {
        match self.goal_estimate {
            Some(center) => {
                let (c0, r0) = goal_footprint_origin(center, goal_size);
                let s = goal_size as i64;
                (c0..c0 + s).contains(&col) && (r0..r0 + s).contains(&row)
            }
            None => false,
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|o| **o).count()
    }

    /// Palette frame for display: obstacles as class 1, goal footprint on top.
    pub fn to_frame(&self, goal_size: usize) -> Frame {
        let mut frame = Frame::new(self.height, self.width);
        for (i, occ) in self.occupancy.iter().enumerate() {
            if *occ {
                frame.set(i / self.width, i % self.width, 1);
            }
        }
        if let Some(center) = self.goal_estimate {
            let (c0, r0) = goal_footprint_origin(center, goal_size);
            let s = goal_size as i64;
            for r in r0..r0 + s {
                for c in c0..c0 + s {
                    if frame.get_signed(r, c).is_some() {
                        frame.set(r as usize, c as usize, crate::env::GOAL);
                    }
                }
            }
        }
        frame
    }
}

/// `k` predicted frames for `t+1 ..= t+k`. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictedRollout {
    steps: Vec<PredictedFrame>,
    model_name: String,
    n_samples: u32,
}

impl PredictedRollout {
    pub fn new(steps: Vec<PredictedFrame>, model_name: impl Into<String>, n_samples: u32) -> Self {
        Self {
            steps,
            model_name: model_name.into(),
            n_samples: n_samples.max(1),
        }
    }

    pub fn steps(&self) -> &[PredictedFrame] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn n_samples(&self) -> u32 {
        self.n_samples
    }
}

/// A model that only sees rendered frames.
pub trait ObservationModel: Send + Sync {
    fn name(&self) -> &str;
    fn predict(&self, history: &History, k: usize) -> Result<PredictedRollout>;
}

fn check_horizon(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::Argument("prediction horizon k must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Goal centroid bounds so a footprint around it stays on the grid.
pub(crate) fn clamp_goal_center(
    center: (f64, f64),
    height: usize,
    width: usize,
    goal_size: usize,
) -> (f64, f64) {
    let half = (goal_size as f64 - 1.0) / 2.0;
    (
        center.0.clamp(half, width as f64 - 1.0 - half),
        center.1.clamp(half, height as f64 - 1.0 - half),
    )
}

/// Ground-truth frames `t+1 ..= t+k` from a clone of `state`.
pub fn true_future_frames(state: &WorldState, k: usize) -> Vec<Frame> {
    let mut sim = state.clone();
    (0..k)
        .map(|_| {
            sim.step_world();
            sim.render_frame()
        })
        .collect()
}
