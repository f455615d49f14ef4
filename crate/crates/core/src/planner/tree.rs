use rand::Rng as _;

use super::{goal_prior, Kinematics, MctsConfig};
use crate::env::{round_px, Action, NUM_ACTIONS};
use crate::error::{Error, Result};
use crate::models::PredictedRollout;
use crate::rng::Rng;

/// Outcome of taking an action from a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Child {
    /// Expanded interior node, index into [`SearchTree::nodes`].
    Node(usize),
    /// Terminal (goal, death) or horizon leaf with a fixed value.
    Leaf(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchNode {
    pub depth: usize,
    pub agent_pos: (f64, f64),
    pub visits: [u32; NUM_ACTIONS],
    pub value_sum: [f64; NUM_ACTIONS],
    pub prior: [f64; NUM_ACTIONS],
    pub children: [Option<Child>; NUM_ACTIONS],
}

impl SearchNode {
    pub fn new(depth: usize, agent_pos: (f64, f64), prior: [f64; NUM_ACTIONS]) -> Self {
        Self {
            depth,
            agent_pos,
            visits: [0; NUM_ACTIONS],
            value_sum: [0.0; NUM_ACTIONS],
            prior,
            children: [None; NUM_ACTIONS],
        }
    }

    /// Mean value of action `a`, 0 when unvisited.
    pub fn q(&self, a: usize) -> f64 {
        if self.visits[a] == 0 {
            0.0
        } else {
            self.value_sum[a] / self.visits[a] as f64
        }
    }

    pub fn total_visits(&self) -> u32 {
        self.visits.iter().sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchTree {
    pub nodes: Vec<SearchNode>,
}

impl SearchTree {
    pub fn root(&self) -> &SearchNode {
        &self.nodes[0]
    }
}

/// `argmax_a Q(a) + c · P(a) · sqrt(ΣN) / (1 + N(a))`, lowest index on ties.
pub fn puct_select(node: &SearchNode, c_puct: f64) -> usize {
    let sqrt_total = (node.total_visits() as f64).sqrt();
    let score = |a: usize| {
        node.q(a) + c_puct * node.prior[a] * sqrt_total / (1.0 + node.visits[a] as f64)
    };
    let mut best = 0;
    let mut best_score = score(0);
    for a in 1..NUM_ACTIONS {
        let s = score(a);
        if s > best_score {
            best = a;
            best_score = s;
        }
    }
    // With no visits every exploration term is 0; fall back to the prior.
    if sqrt_total == 0.0 {
        best = 0;
        for a in 1..NUM_ACTIONS {
            if node.prior[a] > node.prior[best] {
                best = a;
            }
        }
    }
    best
}

/// Adds one visit and `value` to every `(node, action)` edge on `path`.
pub fn backup(tree: &mut SearchTree, path: &[(usize, usize)], value: f64) {
    for &(node, a) in path {
        let n = &mut tree.nodes[node];
        n.visits[a] += 1;
        n.value_sum[a] += value;
    }
}

/// Samples from `π(a) ∝ N(a)^(1/τ)`, computed in log space so small `τ`
/// does not overflow.
pub fn select_by_temperature(visits: &[u32; NUM_ACTIONS], temperature: f64, rng: &mut Rng) -> usize {
    let max = visits.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return 0;
    }
    let log_max = (max as f64).ln();
    let weights: Vec<f64> = visits
        .iter()
        .map(|&n| {
            if n == 0 {
                0.0
            } else {
                (((n as f64).ln() - log_max) / temperature).exp()
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (a, w) in weights.iter().enumerate() {
        if u < *w {
            return a;
        }
        u -= w;
    }
    // Rounding left `u` past the last bucket.
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

pub struct Plan {
    pub action: Action,
    pub tree: SearchTree,
}

struct Search<'a> {
    rollout: &'a PredictedRollout,
    cfg: &'a MctsConfig,
    kin: Kinematics,
    depth_limit: usize,
    diag: f64,
}

impl Search<'_> {
    fn prior_at(&self, depth: usize, pos: (f64, f64)) -> [f64; NUM_ACTIONS] {
        let goal = self.rollout.steps()[depth].goal_estimate();
        goal_prior(pos, goal, self.cfg.prior_kappa)
    }

    /// Moves from `pos` at `depth` with `action`. Returns the new position
    /// and a terminal value if the move hits the goal or an obstacle.
    fn transition(&self, pos: (f64, f64), depth: usize, action: usize) -> ((f64, f64), Option<f64>) {
        let frame = &self.rollout.steps()[depth];
        let (dx, dy) = Action::ALL[action].velocity(self.kin.speed);
        let x = (pos.0 + dx).clamp(0.0, (frame.width() - 1) as f64);
        let y = (pos.1 + dy).clamp(0.0, (frame.height() - 1) as f64);
        let (col, row) = (round_px(x), round_px(y));
        let terminal = if frame.goal_contains(row, col, self.kin.goal_size) {
            Some(self.cfg.goal_value)
        } else if frame.occupied(row, col) {
            Some(self.cfg.death_value)
        } else {
            None
        };
        ((x, y), terminal)
    }

    /// Value of a non-terminal position reached at predicted step `depth`.
    fn leaf_value(&self, pos: (f64, f64), depth: usize) -> f64 {
        if self.cfg.shaping_beta == 0.0 {
            return 0.0;
        }
        match self.rollout.steps()[depth].goal_estimate() {
            Some((gx, gy)) => -self.cfg.shaping_beta * (gx - pos.0).hypot(gy - pos.1) / self.diag,
            None => 0.0,
        }
    }

    fn run(&self, agent_pos: (f64, f64), rng: &mut Rng) -> Plan {
        let mut tree = SearchTree {
            nodes: vec![SearchNode::new(0, agent_pos, self.prior_at(0, agent_pos))],
        };
        let mut path = Vec::with_capacity(self.depth_limit);
        for _ in 0..self.cfg.n_rollouts {
            path.clear();
            let mut node = 0;
            let value = loop {
                let a = puct_select(&tree.nodes[node], self.cfg.c_puct);
                path.push((node, a));
                match tree.nodes[node].children[a] {
                    Some(Child::Leaf(v)) => break v,
                    Some(Child::Node(next)) => node = next,
                    None => {
                        let depth = tree.nodes[node].depth;
                        let (pos, terminal) = self.transition(tree.nodes[node].agent_pos, depth, a);
                        let (child, v) = match terminal {
                            Some(v) => (Child::Leaf(v), v),
                            None if depth + 1 == self.depth_limit => {
                                let v = self.leaf_value(pos, depth);
                                (Child::Leaf(v), v)
                            }
                            None => {
                                let idx = tree.nodes.len();
                                let prior = self.prior_at(depth + 1, pos);
                                tree.nodes.push(SearchNode::new(depth + 1, pos, prior));
                                (Child::Node(idx), self.leaf_value(pos, depth))
                            }
                        };
                        tree.nodes[node].children[a] = Some(child);
                        break v;
                    }
                }
            };
            backup(&mut tree, &path, value);
        }
        let action = select_by_temperature(&tree.root().visits, self.cfg.temperature, rng);
        Plan {
            action: Action::ALL[action],
            tree,
        }
    }
}

/// Runs `n_rollouts` PUCT iterations from `agent_pos` against `rollout` and
/// picks the move by visit-count temperature. Never queries a model.
pub fn plan_action(
    agent_pos: (f64, f64),
    rollout: &PredictedRollout,
    cfg: &MctsConfig,
    kin: Kinematics,
    rng: &mut Rng,
) -> Result<Plan> {
    cfg.validate()?;
    if rollout.is_empty() {
        return Err(Error::Argument("empty predicted rollout".into()));
    }
    if rollout.len() < cfg.rollout_length {
        return Err(Error::Argument(format!(
            "rollout has {} steps, search depth is {}",
            rollout.len(),
            cfg.rollout_length
        )));
    }
    let first = &rollout.steps()[0];
    let search = Search {
        rollout,
        cfg,
        kin,
        depth_limit: cfg.rollout_length,
        diag: (first.width() as f64).hypot(first.height() as f64),
    };
    Ok(search.run(agent_pos, rng))
}
