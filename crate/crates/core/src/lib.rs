//! Model-based planning in a dynamic navigation world.
//!
//! The crate is split into four layers:
//!
//! - [`env`]: a deterministic, seedable simulator with horizontal obstacle
//!   lanes, Poisson arrivals and a reflecting moving goal.
//! - [`models`]: forward models that predict `k` future obstacle grids and
//!   goal positions (oracle, frozen, velocity-estimating, noisy-sampled).
//! - [`planner`]: PUCT Monte-Carlo tree search against a shared predicted
//!   rollout, with a goal-directed prior.
//! - [`harness`]: episode runner, benchmark grid, tables, traces, images
//!   and configuration parsing.

pub mod env;
pub mod error;
pub mod harness;
pub mod models;
pub mod planner;
pub mod rng;

pub use error::{Error, Result};
