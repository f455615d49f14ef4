use crate::env::{Action, NUM_ACTIONS};

/// Von Mises-shaped prior over the eight headings,
/// `P(a) ∝ exp(κ · cos(θ_a − θ_goal))`. Uniform when the goal is unknown or
/// coincides with the agent.
pub fn goal_prior(agent: (f64, f64), goal: Option<(f64, f64)>, kappa: f64) -> [f64; NUM_ACTIONS] {
    let uniform = [1.0 / NUM_ACTIONS as f64; NUM_ACTIONS];
    let Some(goal) = goal else {
        return uniform;
    };
    let (dx, dy) = (goal.0 - agent.0, goal.1 - agent.1);
    if dx.hypot(dy) < 1e-12 {
        return uniform;
    }
    let theta = dy.atan2(dx);
    let mut p = [0.0; NUM_ACTIONS];
    for a in Action::ALL {
        p[a.index()] = (kappa * (a.angle() - theta).cos()).exp();
    }
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= z);
    p
}
