//! Constant-velocity extrapolation from the observation history.
//!
//! Each row is treated as a potential lane. Its per-step horizontal shift is
//! found by maximizing the overlap of consecutive occupancy rows over shifts
//! in `-MAX_SHIFT..=MAX_SHIFT`, averaged over the three consecutive pairs and
//! rounded to the nearest half pixel. The latest row is then translated,
//! keeping the whole-pixel cadence a half-pixel shift showed in the history;
//! cells entering from outside the grid are empty, so arrivals that are not
//! yet visible are never predicted.
//!
//! The goal center is fitted with a least-squares line through the four
//! history centroids and extrapolated with the same wall reflection the
//! simulator uses.

use super::{
    check_horizon, clamp_goal_center, History, ObservationModel, PredictedFrame, PredictedRollout,
    HISTORY_LEN,
};
use crate::env::{fold_reflect, round_px, Frame, GOAL};
use crate::error::Result;

pub const MAX_SHIFT: i64 = 4;

/// Integer shift `s` maximizing `Σ prev[x] · next[x + s]`. Ties go to the
/// smaller `|s|`, then to the positive shift. `None` when either row is empty
/// or no shift produces any overlap.
pub fn estimate_row_shift(prev: &[bool], next: &[bool]) -> Option<i64> {
    if !prev.iter().any(|v| *v) || !next.iter().any(|v| *v) {
        return None;
    }
    let n = prev.len().min(next.len()) as i64;
    let mut best: Option<(usize, i64)> = None;
    for mag in 0..=MAX_SHIFT {
        for s in if mag == 0 { vec![0] } else { vec![mag, -mag] } {
            let score = (0..n)
                .filter(|&x| {
                    let y = x + s;
                    (0..n).contains(&y) && prev[x as usize] && next[y as usize]
                })
                .count();
            if score > 0 && best.is_none_or(|(b, _)| score > b) {
                best = Some((score, s));
            }
        }
    }
    best.map(|(_, s)| s)
}

fn row_mask(frame: &Frame, row: usize) -> Vec<bool> {
    (0..frame.width())
        .map(|c| Frame::is_obstacle_value(frame.get(row, c)))
        .collect()
}

/// Per-row motion: the per-step shift, rounded to a half pixel, and the
/// row's fitted sub-pixel position at the latest frame.
///
/// A half-pixel shift renders as alternating whole-pixel moves. Anchoring
/// the extrapolation at the fitted position keeps that alternation in step
/// with what the history showed, rather than rounding `i × shift` alone.
#[derive(Clone, Copy, Debug, PartialEq)]
struct RowMotion {
    shift: f64,
    offset: f64,
}

impl RowMotion {
    /// Whole-pixel displacement of the latest row after `i` more steps.
    fn displacement(&self, i: usize) -> i64 {
        round_px(self.offset + self.shift * i as f64) - round_px(self.offset)
    }
}

fn row_motion(history: &History, row: usize) -> RowMotion {
    let masks: Vec<Vec<bool>> = history.frames().map(|f| row_mask(f, row)).collect();
    let pairs: Vec<Option<i64>> = masks
        .windows(2)
        .map(|w| estimate_row_shift(&w[0], &w[1]))
        .collect();
    let known: Vec<i64> = pairs.iter().flatten().copied().collect();
    if known.is_empty() {
        return RowMotion {
            shift: 0.0,
            offset: 0.0,
        };
    }
    let mean = known.iter().sum::<i64>() as f64 / known.len() as f64;
    let shift = (mean * 2.0).round() / 2.0;
    if known.len() < pairs.len() {
        // A gap in the track leaves the cycle position unknown.
        return RowMotion { shift, offset: 0.0 };
    }
    let mut cumulative = vec![0i64];
    for s in &known {
        cumulative.push(cumulative.last().unwrap() + s);
    }
    let n = cumulative.len() as f64;
    let intercept = cumulative
        .iter()
        .enumerate()
        .map(|(j, c)| *c as f64 - shift * j as f64)
        .sum::<f64>()
        / n;
    RowMotion {
        shift,
        offset: intercept + shift * (n - 1.0),
    }
}

/// Side of the goal square, inferred from its pixel count.
fn goal_size_of(frame: &Frame) -> usize {
    ((frame.count(GOAL) as f64).sqrt().round() as usize).max(1)
}

/// Least-squares `(value at latest index, slope)` for each axis.
fn fit_goal_track(history: &History) -> Option<((f64, f64), (f64, f64))> {
    history.latest().goal_center()?;
    let pts: Vec<(f64, (f64, f64))> = history
        .frames()
        .enumerate()
        .filter_map(|(i, f)| f.goal_center().map(|c| (i as f64, c)))
        .collect();
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_x = pts.iter().map(|p| p.1 .0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1 .1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let (vx, vy) = if stt > 0.0 {
        (
            pts.iter().map(|p| (p.0 - mean_t) * (p.1 .0 - mean_x)).sum::<f64>() / stt,
            pts.iter().map(|p| (p.0 - mean_t) * (p.1 .1 - mean_y)).sum::<f64>() / stt,
        )
    } else {
        (0.0, 0.0)
    };
    let last = (HISTORY_LEN - 1) as f64;
    Some((
        (mean_x + vx * (last - mean_t), mean_y + vy * (last - mean_t)),
        (vx, vy),
    ))
}

pub fn velocity_predict(history: &History, k: usize) -> Result<PredictedRollout> {
    check_horizon(k)?;
    let latest = history.latest();
    let (h, w) = (latest.height(), latest.width());
    let goal_size = goal_size_of(latest);

    let motion: Vec<RowMotion> = (0..h).map(|r| row_motion(history, r)).collect();
    let latest_mask = latest.obstacle_mask();
    let track = fit_goal_track(history);
    let half = (goal_size as f64 - 1.0) / 2.0;
    let max_x = w.saturating_sub(goal_size) as f64;
    let max_y = h.saturating_sub(goal_size) as f64;

    let steps = (1..=k)
        .map(|i| {
            let mut occ = vec![false; h * w];
            for (r, m) in motion.iter().enumerate() {
                let d = m.displacement(i);
                let src = &latest_mask[r * w..(r + 1) * w];
                for c in 0..w as i64 {
                    let from = c - d;
                    if (0..w as i64).contains(&from) && src[from as usize] {
                        occ[r * w + c as usize] = true;
                    }
                }
            }
            let goal = track.map(|((x, y), (vx, vy))| {
                let (tx, _) = fold_reflect(x - half + vx * i as f64, max_x);
                let (ty, _) = fold_reflect(y - half + vy * i as f64, max_y);
                clamp_goal_center((tx + half, ty + half), h, w, goal_size)
            });
            PredictedFrame::new(h, w, occ, goal).expect("dimensions match")
        })
        .collect();
    Ok(PredictedRollout::new(steps, "velocity", 1))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VelocityModel;

impl ObservationModel for VelocityModel {
    fn name(&self) -> &str {
        "velocity"
    }

    fn predict(&self, history: &History, k: usize) -> Result<PredictedRollout> {
        velocity_predict(history, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Obstacle, WorldConfig, WorldState};
    use crate::models::{oracle_predict, prediction_error};

    fn quiet_state(seed: u64) -> WorldState {
        let cfg = WorldConfig {
            level: 0.0,
            warmup_steps: 0,
            ..WorldConfig::default()
        };
        WorldState::blank(cfg, seed).unwrap()
    }

    fn history_of(state: &mut WorldState) -> History {
        let mut h = History::new(state.render_frame(), state.t);
        for _ in 0..3 {
            state.step_world();
            h.push(state.render_frame());
        }
        h
    }

    #[test]
    fn shift_search() {
        let row = |cols: &[usize]| {
            let mut v = vec![false; 12];
            for c in cols {
                v[*c] = true;
            }
            v
        };
        assert_eq!(estimate_row_shift(&row(&[2, 3]), &row(&[4, 5])), Some(2));
        assert_eq!(estimate_row_shift(&row(&[5]), &row(&[4])), Some(-1));
        assert_eq!(estimate_row_shift(&row(&[5]), &row(&[5])), Some(0));
        assert_eq!(estimate_row_shift(&row(&[]), &row(&[5])), None);
        // Beyond the search range.
        assert_eq!(estimate_row_shift(&row(&[0]), &row(&[9])), None);
        // Symmetric tie: one pixel both ways; positive wins.
        assert_eq!(estimate_row_shift(&row(&[5]), &row(&[4, 6])), Some(1));
    }

    #[test]
    fn integer_speed_is_exact() {
        let mut state = quiet_state(4);
        state.goal.pos = (40.0, 40.0);
        state.obstacles = vec![Obstacle::new(2, 8.0, 3, 1.0)];
        let history = history_of(&mut state);
        let k = 6;
        let predicted = velocity_predict(&history, k).unwrap();
        let oracle = oracle_predict(&state, k).unwrap();
        for (p, o) in predicted.steps().iter().zip(oracle.steps()) {
            assert_eq!(p.occupancy(), o.occupancy());
        }
    }

    #[test]
    fn half_pixel_speed_keeps_cadence() {
        // Renders at 8, 9, 9, 10 in the history, then 10, 11, 11, 12, ...
        let mut state = quiet_state(4);
        state.goal.pos = (40.0, 40.0);
        state.obstacles = vec![Obstacle::new(2, 8.0, 2, 0.5)];
        let history = history_of(&mut state);
        let predicted = velocity_predict(&history, 8).unwrap();
        let oracle = oracle_predict(&state, 8).unwrap();
        for (p, o) in predicted.steps().iter().zip(oracle.steps()) {
            assert_eq!(p.occupancy(), o.occupancy());
        }
    }

    #[test]
    fn unseen_arrival_is_a_false_negative() {
        let cfg = WorldConfig {
            warmup_steps: 0,
            ..WorldConfig::default()
        };
        // Find a state whose future holds a spawn that becomes visible.
        for seed in 0..500 {
            let mut state = WorldState::blank(cfg.clone(), seed).unwrap();
            state.goal.pos = (40.0, 46.0);
            let history = history_of(&mut state);
            if !state.obstacles.is_empty() || history.latest().obstacle_mask().iter().any(|v| *v)
            {
                continue;
            }
            let truth = crate::models::true_future_frames(&state, 4);
            let Some(i) = truth.iter().position(|f| f.obstacle_mask().iter().any(|v| *v)) else {
                continue;
            };
            let predicted = velocity_predict(&history, 4).unwrap();
            let e = prediction_error(&predicted.steps()[i], &truth[i]).unwrap();
            assert!(e.fn_count() > 0);
            assert_eq!(predicted.steps()[i].occupied_count(), 0);
            return;
        }
        panic!("no seed produced a fresh arrival");
    }

    #[test]
    fn goal_extrapolation_within_a_pixel() {
        let mut state = quiet_state(9);
        state.goal.pos = (10.0, 20.0);
        state.goal.vel = (0.5, 0.0);
        let history = history_of(&mut state);
        let last = history.latest().goal_center().unwrap();
        let predicted = velocity_predict(&history, 8).unwrap();
        for (i, step) in predicted.steps().iter().enumerate() {
            let k = (i + 1) as f64;
            let (x, y) = step.goal_estimate().unwrap();
            assert!((x - (last.0 + 0.5 * k)).abs() <= 1.0, "k={k}: x={x}");
            assert!((y - last.1).abs() <= 1e-9);
        }
    }

    #[test]
    fn no_goal_means_no_estimate() {
        let h = History::new(Frame::new(8, 8), 0);
        let r = velocity_predict(&h, 2).unwrap();
        assert!(r.steps().iter().all(|s| s.goal_estimate().is_none()));
    }

    #[test]
    fn never_predicts_in_empty_rows() {
        for seed in 0..20 {
            let state = WorldState::new_episode(WorldConfig::default(), seed).unwrap();
            let mut s = state.clone();
            let history = history_of(&mut s);
            let predicted = velocity_predict(&history, 10).unwrap();
            let w = 48;
            for r in 0..48 {
                let seen = history
                    .frames()
                    .any(|f| (0..w).any(|c| Frame::is_obstacle_value(f.get(r, c))));
                if !seen {
                    for step in predicted.steps() {
                        assert!((0..w).all(|c| !step.occupancy()[r * w + c]));
                    }
                }
            }
        }
    }
}
