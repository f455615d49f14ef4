//! PUCT tree search over the eight agent actions.
//!
//! The tree is searched against one [`PredictedRollout`]: the edge from depth
//! `d` to `d + 1` moves the simulated agent and checks the pixel it lands on
//! against predicted step `d` (world time `t + d + 1`). Landing in the
//! predicted goal footprint is worth `goal_value`, landing on predicted
//! occupancy `death_value`; both end the branch. Other leaves are worth 0
//! unless distance shaping is turned on. Values are backed up undiscounted.

mod config;
mod prior;
mod tree;

pub use config::{Kinematics, MctsConfig};
pub use prior::goal_prior;
pub use tree::{backup, plan_action, puct_select, select_by_temperature, Child, Plan, SearchNode, SearchTree};
