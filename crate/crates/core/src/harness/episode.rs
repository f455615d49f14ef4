use rand::Rng as _;
use serde::Serialize;

use crate::env::{Action, Frame, Outcome, OutcomeKind, WorldConfig, WorldState, NUM_ACTIONS};
use crate::error::{Error, Result};
use crate::models::{Forecaster, History, ModelSpec};
use crate::planner::{plan_action, Kinematics, MctsConfig};
use crate::rng::{self, Stream};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: u32,
    pub agent_pos: (f64, f64),
    pub action: Action,
    pub reward: f64,
    pub outcome: OutcomeKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub episode_seed: u64,
    pub outcome: Outcome,
    pub steps: u32,
    pub trace: Vec<StepRecord>,
    /// Frame at `t = 0` followed by the frame after every step, when kept.
    pub frames: Option<Vec<Frame>>,
    pub model: ModelSpec,
    pub world: WorldConfig,
    pub mcts: MctsConfig,
    /// Rollouts requested from the forward model.
    pub model_calls: u64,
    /// Predicted frames across those rollouts.
    pub frames_generated: u64,
    pub decisions: u64,
}

impl EpisodeRecord {
    pub fn actions(&self) -> Vec<Action> {
        self.trace.iter().map(|s| s.action).collect()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub keep_frames: bool,
}

/// Plays one episode to completion.
///
/// Each decision requests one `k`-step rollout from the model, searches it,
/// and applies the chosen action. The `none` model draws uniform actions
/// and never plans.
pub fn run_episode(
    world_cfg: &WorldConfig,
    mcts_cfg: &MctsConfig,
    model: ModelSpec,
    episode_seed: u64,
    opts: RunOptions,
) -> Result<EpisodeRecord> {
    mcts_cfg.validate()?;
    let mut world = WorldState::new_episode(world_cfg.clone(), episode_seed)?;
    let mut history = History::new(world.render_frame(), 0);
    let mut frames = opts.keep_frames.then(|| vec![history.latest().clone()]);
    let mut forecaster = Forecaster::new(model, episode_seed);
    let mut plan_rng = rng::stream(episode_seed, Stream::Planner);
    let mut policy_rng = rng::stream(episode_seed, Stream::Policy);
    let kin = Kinematics::from(world_cfg);
    let k = mcts_cfg.rollout_length;

    let mut trace = Vec::new();
    let mut decisions = 0u64;
    let outcome = loop {
        let action = if model.is_planning() {
            forecaster
                .predict(&world, &history, k)
                .and_then(|r| plan_action(world.agent.pos, &r, mcts_cfg, kin, &mut plan_rng))
                .map(|p| p.action)
                .map_err(|e| {
                    Error::State(format!(
                        "episode {episode_seed:#x} aborted at t={} ({model}): {e}",
                        world.t
                    ))
                })?
        } else {
            Action::ALL[policy_rng.random_range(0..NUM_ACTIONS)]
        };
        decisions += 1;
        let outcome = world.step_agent(action)?;
        let frame = world.render_frame();
        if let Some(frames) = frames.as_mut() {
            frames.push(frame.clone());
        }
        history.push(frame);
        trace.push(StepRecord {
            t: world.t,
            agent_pos: world.agent.pos,
            action,
            reward: outcome.reward,
            outcome: outcome.kind,
        });
        if outcome.kind.is_terminal() {
            break outcome;
        }
    };

    Ok(EpisodeRecord {
        episode_seed,
        outcome,
        steps: outcome.steps_taken,
        trace,
        frames,
        model,
        world: world_cfg.clone(),
        mcts: mcts_cfg.clone(),
        model_calls: forecaster.calls(),
        frames_generated: forecaster.frames_generated(),
        decisions,
    })
}

/// Re-applies `actions` to a fresh episode and returns every outcome.
pub fn replay(world_cfg: &WorldConfig, episode_seed: u64, actions: &[Action]) -> Result<Vec<Outcome>> {
    let mut world = WorldState::new_episode(world_cfg.clone(), episode_seed)?;
    actions.iter().map(|a| world.step_agent(*a)).collect()
}
