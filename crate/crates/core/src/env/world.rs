use std::f64::consts::TAU;
use std::sync::Arc;

use rand::Rng as _;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::config::{Direction, WorldConfig};
use super::frame::{Frame, FREE, GOAL};
use super::geometry::{fold_reflect, round_px, Action};
use crate::error::{Error, Result};
use crate::rng::{self, Rng, Stream};

pub const GOAL_REWARD: f64 = 20.0;
pub const DIED_REWARD: f64 = -20.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lane {
    pub row: usize,
    pub class_id: u8,
    pub direction: Direction,
}

/// An obstacle body occupying `length` pixels of its lane row, ending at
/// `head_x` on the right: pixels `round(head_x) - i` for `i in 0..length`.
///
/// Position is kept as spawn point plus `speed · age`, so displacement over
/// any interval is exactly `speed` times its length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub lane: usize,
    pub length: u32,
    pub speed: f64,
    origin_x: f64,
    age: u32,
}

impl Obstacle {
    pub fn new(lane: usize, head_x: f64, length: u32, speed: f64) -> Self {
        Self {
            lane,
            length: length.max(1),
            speed,
            origin_x: head_x,
            age: 0,
        }
    }

    pub fn head_x(&self) -> f64 {
        self.origin_x + self.speed * self.age as f64
    }

    /// Inclusive pixel span `(left, right)`, possibly outside the grid.
    pub fn span(&self) -> (i64, i64) {
        let right = round_px(self.head_x());
        (right - (self.length as i64 - 1), right)
    }

    fn advance(&mut self) {
        self.age += 1;
    }

    fn has_exited(&self, width: usize) -> bool {
        let (left, right) = self.span();
        if self.speed >= 0.0 {
            left >= width as i64
        } else {
            right < 0
        }
    }
}

/// Goal with top-left corner at `pos`; it covers a `goal_size` square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalState {
    pub pos: (f64, f64),
    pub vel: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub pos: (f64, f64),
    pub alive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeKind {
    GoalReached,
    Died,
    TimedOut,
    Running,
}

impl OutcomeKind {
    pub fn is_terminal(self) -> bool {
        self != OutcomeKind::Running
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::GoalReached => "GoalReached",
            OutcomeKind::Died => "Died",
            OutcomeKind::TimedOut => "TimedOut",
            OutcomeKind::Running => "Running",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub reward: f64,
    pub steps_taken: u32,
}

impl Outcome {
    fn running(t: u32) -> Self {
        Self {
            kind: OutcomeKind::Running,
            reward: 0.0,
            steps_taken: t,
        }
    }
}

/// What one call to [`WorldState::step_world`] did.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    /// Poisson arrivals drawn across lanes, before overlap rejection.
    pub arrivals: u32,
    pub spawned: u32,
    pub removed: u32,
}

#[derive(Clone, Debug, PartialEq)]
struct Streams {
    spawn: Rng,
    class: Rng,
    placement: Rng,
}

/// Full hidden simulator state. Cloning it (RNG included) and stepping both
/// copies produces identical futures.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub config: Arc<WorldConfig>,
    pub t: u32,
    pub lanes: Vec<Lane>,
    pub obstacles: Vec<Obstacle>,
    pub goal: GoalState,
    pub agent: AgentState,
    outcome: Outcome,
    streams: Streams,
    arrivals_total: u64,
}

impl WorldState {
    /// Lanes assigned, no obstacles, goal and agent at the origin and at rest,
    /// no warm-up. Building block for [`WorldState::new_episode`] and tests.
    pub fn blank(config: WorldConfig, episode_seed: u64) -> Result<Self> {
        config.validate()?;
        let mut streams = Streams {
            spawn: rng::stream(episode_seed, Stream::Spawn),
            class: rng::stream(episode_seed, Stream::Class),
            placement: rng::stream(episode_seed, Stream::Placement),
        };
        let lanes = config
            .lane_rows
            .iter()
            .map(|&row| {
                let class = streams.class.random_range(0..config.obstacle_classes.len());
                let direction = if streams.class.random_bool(0.5) {
                    Direction::LeftToRight
                } else {
                    Direction::RightToLeft
                };
                Lane {
                    row,
                    class_id: config.obstacle_classes[class].class_id,
                    direction,
                }
            })
            .collect();
        Ok(Self {
            config: Arc::new(config),
            t: 0,
            lanes,
            obstacles: Vec::new(),
            goal: GoalState {
                pos: (0.0, 0.0),
                vel: (0.0, 0.0),
            },
            agent: AgentState {
                pos: (0.0, 0.0),
                alive: true,
            },
            outcome: Outcome::running(0),
            streams,
            arrivals_total: 0,
        })
    }

    /// Fresh episode: random lanes, goal with a uniformly random heading,
    /// `warmup_steps` world steps, then the agent on a free pixel (preferring
    /// rows without a lane). `t` is reset to 0 afterwards.
    pub fn new_episode(config: WorldConfig, episode_seed: u64) -> Result<Self> {
        let mut state = Self::blank(config, episode_seed)?;
        let cfg = Arc::clone(&state.config);

        let gmax_x = (cfg.grid_w - cfg.goal_size) as f64;
        let gmax_y = (cfg.grid_h - cfg.goal_size) as f64;
        let p = &mut state.streams.placement;
        let gx = p.random::<f64>() * gmax_x;
        let gy = p.random::<f64>() * gmax_y;
        let heading = p.random::<f64>() * TAU;
        state.goal = GoalState {
            pos: (gx, gy),
            vel: (cfg.goal_speed * heading.cos(), cfg.goal_speed * heading.sin()),
        };

        for _ in 0..cfg.warmup_steps {
            state.step_world();
        }
        state.t = 0;
        state.arrivals_total = 0;

        let frame = state.render_frame();
        let free = |lanes_ok: bool| -> Vec<(usize, usize)> {
            (0..cfg.grid_h)
                .filter(|r| lanes_ok || !cfg.is_lane_row(*r))
                .flat_map(|r| (0..cfg.grid_w).map(move |c| (r, c)))
                .filter(|&(r, c)| frame.get(r, c) == FREE)
                .collect()
        };
        let mut candidates = free(false);
        if candidates.is_empty() {
            candidates = free(true);
        }
        if candidates.is_empty() {
            return Err(Error::Placement("no free pixel for the agent".into()));
        }
        let (r, c) = candidates[state.streams.placement.random_range(0..candidates.len())];
        state.agent.pos = (c as f64, r as f64);
        state.outcome = Outcome::running(0);
        Ok(state)
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    /// Poisson arrivals drawn since `t = 0`, before overlap rejection.
    pub fn arrivals_total(&self) -> u64 {
        self.arrivals_total
    }

    /// Advances obstacles, removes exited ones, spawns arrivals, moves the
    /// goal and increments `t`. The agent is untouched.
    pub fn step_world(&mut self) -> StepStats {
        let cfg = Arc::clone(&self.config);
        let width = cfg.grid_w;
        let mut stats = StepStats::default();

        for ob in &mut self.obstacles {
            ob.advance();
        }

        let before = self.obstacles.len();
        self.obstacles.retain(|ob| !ob.has_exited(width));
        stats.removed = (before - self.obstacles.len()) as u32;

        let rate = cfg.spawn_rate();
        if rate > 0.0 {
            let poisson = Poisson::new(rate).expect("rate checked positive");
            for (li, lane) in self.lanes.iter().enumerate() {
                let n = poisson.sample(&mut self.streams.spawn) as u32;
                stats.arrivals += n;
                for _ in 0..n {
                    let class = cfg
                        .obstacle_classes
                        .iter()
                        .find(|c| c.class_id == lane.class_id)
                        .expect("lane class exists");
                    let c = &mut self.streams.class;
                    let length = (class.mean_length
                        + class.length_jitter * (2.0 * c.random::<f64>() - 1.0))
                        .round()
                        .max(1.0) as u32;
                    let speed =
                        class.mean_speed + class.speed_jitter * (2.0 * c.random::<f64>() - 1.0);
                    // Body fully outside the entry edge, touching it.
                    let head_x = match lane.direction {
                        Direction::LeftToRight => -1.0,
                        Direction::RightToLeft => (width + length as usize - 1) as f64,
                    };
                    let candidate =
                        Obstacle::new(li, head_x, length, speed * lane.direction.sign());
                    let (l0, r0) = candidate.span();
                    let overlaps = self.obstacles.iter().any(|o| {
                        let (l1, r1) = o.span();
                        o.lane == li && l0 <= r1 && l1 <= r0
                    });
                    if !overlaps {
                        self.obstacles.push(candidate);
                        stats.spawned += 1;
                    }
                }
            }
        }
        self.arrivals_total += stats.arrivals as u64;

        let gmax_x = (cfg.grid_w - cfg.goal_size) as f64;
        let gmax_y = (cfg.grid_h - cfg.goal_size) as f64;
        let (x, fx) = fold_reflect(self.goal.pos.0 + self.goal.vel.0, gmax_x);
        let (y, fy) = fold_reflect(self.goal.pos.1 + self.goal.vel.1, gmax_y);
        if fx {
            self.goal.vel.0 = -self.goal.vel.0;
        }
        if fy {
            self.goal.vel.1 = -self.goal.vel.1;
        }
        self.goal.pos = (x, y);

        self.t += 1;
        stats
    }

    /// Steps the world, then moves the agent and scores the move against the
    /// post-step world. Goal contact wins over obstacle contact.
    pub fn step_agent(&mut self, action: Action) -> Result<Outcome> {
        if self.outcome.kind.is_terminal() {
            return Err(Error::State(format!(
                "episode already finished ({:?} at t={})",
                self.outcome.kind, self.outcome.steps_taken
            )));
        }
        self.step_world();

        let cfg = &self.config;
        let (dx, dy) = action.velocity(cfg.agent_speed);
        let x = (self.agent.pos.0 + dx).clamp(0.0, (cfg.grid_w - 1) as f64);
        let y = (self.agent.pos.1 + dy).clamp(0.0, (cfg.grid_h - 1) as f64);
        self.agent.pos = (x, y);
        let (col, row) = (round_px(x), round_px(y));

        let (kind, reward) = if self.goal_contains(row, col) {
            (OutcomeKind::GoalReached, GOAL_REWARD)
        } else if self.obstacle_at(row, col) {
            self.agent.alive = false;
            (OutcomeKind::Died, DIED_REWARD)
        } else if self.t >= cfg.max_steps {
            (OutcomeKind::TimedOut, 0.0)
        } else {
            (OutcomeKind::Running, 0.0)
        };
        self.outcome = Outcome {
            kind,
            reward,
            steps_taken: self.t,
        };
        Ok(self.outcome)
    }

    /// Top-left pixel of the goal footprint.
    pub fn goal_origin(&self) -> (i64, i64) {
        (round_px(self.goal.pos.0), round_px(self.goal.pos.1))
    }

    /// Centroid of the rendered goal footprint.
    pub fn goal_center(&self) -> (f64, f64) {
        let (c, r) = self.goal_origin();
        let half = (self.config.goal_size as f64 - 1.0) / 2.0;
        (c as f64 + half, r as f64 + half)
    }

    pub fn goal_contains(&self, row: i64, col: i64) -> bool {
        let (c0, r0) = self.goal_origin();
        let s = self.config.goal_size as i64;
        (c0..c0 + s).contains(&col) && (r0..r0 + s).contains(&row)
    }

    pub fn obstacle_at(&self, row: i64, col: i64) -> bool {
        self.obstacles.iter().any(|o| {
            let (l, r) = o.span();
            self.lanes[o.lane].row as i64 == row && (l..=r).contains(&col)
        })
    }

    pub fn render_frame(&self) -> Frame {
        let cfg = &self.config;
        let mut frame = Frame::new(cfg.grid_h, cfg.grid_w);
        for ob in &self.obstacles {
            let lane = &self.lanes[ob.lane];
            let (l, r) = ob.span();
            for col in l.max(0)..=r.min(cfg.grid_w as i64 - 1) {
                frame.set(lane.row, col as usize, lane.class_id);
            }
        }
        let (c0, r0) = self.goal_origin();
        let s = cfg.goal_size as i64;
        for row in r0..r0 + s {
            for col in c0..c0 + s {
                if row >= 0 && col >= 0 && row < cfg.grid_h as i64 && col < cfg.grid_w as i64 {
                    frame.set(row as usize, col as usize, GOAL);
                }
            }
        }
        frame
    }
}
