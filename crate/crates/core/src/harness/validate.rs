//! Statistical self-checks of the simulator and planner, shared by the
//! `validate` command and the test suites.

use std::f64::consts::TAU;
use std::fmt;

use rand::Rng as _;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::env::{Action, WorldConfig, WorldState, NUM_ACTIONS};
use crate::error::{Error, Result};
use crate::models::{oracle_predict, prediction_error, true_future_frames};
use crate::planner::{plan_action, Kinematics, MctsConfig};
use crate::rng::{self, episode_seed, Rng, Stream};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// A mid-episode state: a fresh episode advanced by up to `max_steps`
/// random agent moves, stopping early if the episode ends.
pub fn sample_state(cfg: &WorldConfig, seed: u64, max_steps: u32) -> Result<WorldState> {
    let mut state = WorldState::new_episode(cfg.clone(), seed)?;
    let mut rng = rng::stream(seed, Stream::Policy);
    let steps = rng.random_range(0..=max_steps);
    for _ in 0..steps {
        let a = Action::ALL[rng.random_range(0..NUM_ACTIONS)];
        let before = state.clone();
        if state.step_agent(a)?.kind.is_terminal() {
            return Ok(before);
        }
    }
    Ok(state)
}

/// Mean Poisson arrivals per lane per step against the configured rate.
pub fn spawn_rate(cfg: &WorldConfig, steps: u64, seed: u64, rel_tol: f64) -> Result<CheckResult> {
    let mut state = WorldState::new_episode(cfg.clone(), seed)?;
    let lanes = cfg.lane_rows.len() as f64;
    if lanes == 0.0 || cfg.spawn_rate() == 0.0 {
        return Err(Error::Config("spawn-rate check needs lanes and a positive rate".into()));
    }
    let arrivals: u64 = (0..steps).map(|_| state.step_world().arrivals as u64).sum();
    let measured = arrivals as f64 / (steps as f64 * lanes);
    let rel = (measured - cfg.spawn_rate()).abs() / cfg.spawn_rate();
    Ok(CheckResult {
        name: "spawn rate",
        passed: rel <= rel_tol,
        detail: format!(
            "{measured:.5} arrivals/lane/step vs {:.5} over {steps} steps (rel err {rel:.4}, tol {rel_tol})",
            cfg.spawn_rate()
        ),
    })
}

/// Goal speed magnitude after every world step, including reflections.
pub fn goal_speed(cfg: &WorldConfig, steps: u64, seed: u64, tol: f64) -> Result<CheckResult> {
    let mut state = WorldState::new_episode(cfg.clone(), seed)?;
    let mut worst = 0.0f64;
    let mut flips = 0u64;
    for _ in 0..steps {
        let before = state.goal.vel;
        state.step_world();
        let (vx, vy) = state.goal.vel;
        flips += (vx != before.0 || vy != before.1) as u64;
        worst = worst.max((vx.hypot(vy) - cfg.goal_speed).abs());
    }
    Ok(CheckResult {
        name: "goal speed",
        passed: worst <= tol,
        detail: format!("max |speed - {}| = {worst:.3e} over {steps} steps, {flips} reflections", cfg.goal_speed),
    })
}

/// Chi-square uniformity of initial goal headings over 8 equal bins.
pub fn goal_heading(cfg: &WorldConfig, n_seeds: u64, master: u64, alpha: f64) -> Result<CheckResult> {
    const BINS: usize = 8;
    let mut counts = [0u64; BINS];
    for i in 0..n_seeds {
        let state = WorldState::new_episode(cfg.clone(), episode_seed(master, i))?;
        let (vx, vy) = state.goal.vel;
        let angle = vy.atan2(vx).rem_euclid(TAU);
        counts[((angle / TAU * BINS as f64) as usize).min(BINS - 1)] += 1;
    }
    let expected = n_seeds as f64 / BINS as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dist = ChiSquared::new((BINS - 1) as f64).map_err(|e| Error::State(e.to_string()))?;
    let critical = dist.inverse_cdf(1.0 - alpha);
    Ok(CheckResult {
        name: "goal heading uniformity",
        passed: stat <= critical,
        detail: format!("chi2 = {stat:.3} vs critical {critical:.3} (alpha {alpha}, {n_seeds} seeds, bins {counts:?})"),
    })
}

/// Root visit counts sum to `n_rollouts` for searches on random states.
pub fn visit_conservation(
    cfg: &WorldConfig,
    mcts: &MctsConfig,
    n_searches: u64,
    master: u64,
) -> Result<CheckResult> {
    let kin = Kinematics::from(cfg);
    let mut rng: Rng = rng::stream(master, Stream::Planner);
    let mut bad = 0u64;
    for i in 0..n_searches {
        let state = sample_state(cfg, episode_seed(master, i), 20)?;
        let k = rng.random_range(1..=10usize);
        let mcts = MctsConfig {
            rollout_length: k,
            ..mcts.clone()
        };
        let rollout = oracle_predict(&state, k)?;
        let plan = plan_action(state.agent.pos, &rollout, &mcts, kin, &mut rng)?;
        bad += (plan.tree.root().total_visits() as usize != mcts.n_rollouts) as u64;
    }
    Ok(CheckResult {
        name: "visit conservation",
        passed: bad == 0,
        detail: format!("{bad} of {n_searches} searches with sum N(root) != {}", mcts.n_rollouts),
    })
}

/// The oracle model reproduces the true future exactly.
pub fn oracle_exactness(cfg: &WorldConfig, n_pairs: u64, master: u64) -> Result<CheckResult> {
    let mut rng: Rng = rng::stream(master, Stream::Model);
    let (mut fn_total, mut fp_total, mut goal_bad) = (0usize, 0usize, 0usize);
    for i in 0..n_pairs {
        let state = sample_state(cfg, episode_seed(master, i), 60)?;
        let k = rng.random_range(1..=10usize);
        let rollout = oracle_predict(&state, k)?;
        for (pred, truth) in rollout.steps().iter().zip(true_future_frames(&state, k)) {
            let err = prediction_error(pred, &truth)?;
            fn_total += err.fn_count();
            fp_total += err.fp_count();
            goal_bad += (err.goal_err != Some(0.0)) as usize;
        }
    }
    Ok(CheckResult {
        name: "oracle exactness",
        passed: fn_total == 0 && fp_total == 0 && goal_bad == 0,
        detail: format!("{n_pairs} pairs: FN {fn_total}, FP {fp_total}, goal mismatches {goal_bad}"),
    })
}

/// Every check at the default sizes used by the acceptance suite.
pub fn run_all(cfg: &WorldConfig, mcts: &MctsConfig, master: u64) -> Result<Vec<CheckResult>> {
    Ok(vec![
        spawn_rate(cfg, 100_000, master, 0.02)?,
        goal_speed(cfg, 10_000, master, 1e-9)?,
        goal_heading(cfg, 1_000, master, 0.01)?,
        visit_conservation(cfg, mcts, 1_000, master)?,
        oracle_exactness(cfg, 1_000, master)?,
    ])
}
