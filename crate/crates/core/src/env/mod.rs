//! The dynamic navigation environment.
//!
//! The world is a `grid_h × grid_w` pixel field. Obstacles travel along
//! horizontal lanes at a constant per-obstacle speed and arrive by a Poisson
//! process; a 2×2 goal drifts at a fixed speed and reflects off the walls;
//! a 1×1 agent moves in one of eight directions. Positions are continuous,
//! collision and goal checks are done on the nearest pixel.
//!
//! World dynamics never depend on the agent, so the sequence of rendered
//! frames is a function of the episode seed and the step index only.

mod config;
mod frame;
mod geometry;
mod world;

pub use config::{
    default_lane_rows, Direction, ObstacleClass, SpeedPreset, WorldConfig, DEFAULT_WARMUP_STEPS,
};
pub use frame::{Frame, FREE, GOAL};
pub use geometry::{
    action_to_velocity, fold_reflect, goal_footprint_origin, round_px, Action, NUM_ACTIONS,
};
pub use world::{
    AgentState, GoalState, Lane, Obstacle, Outcome, OutcomeKind, StepStats, WorldState,
    DIED_REWARD, GOAL_REWARD,
};
