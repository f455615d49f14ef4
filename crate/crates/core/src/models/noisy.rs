//! Stochastic surrogate for a sampled generative model.
//!
//! Each sample corrupts the oracle rollout independently: occupied cells are
//! dropped with probability `p_fn`, free non-goal cells are set with
//! probability `p_fp`, and the goal center is jittered by an isotropic
//! Gaussian whose standard deviation grows as `goal_sigma · i` at step `i`.
//! Samples are merged by a cell-wise max (union) of occupancy and a
//! coordinate-wise median of goal centers.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use super::{check_horizon, clamp_goal_center, true_future_frames, PredictedFrame, PredictedRollout};
use crate::env::{Frame, WorldState, GOAL};
use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseParams {
    pub p_fn: f64,
    pub p_fp: f64,
    pub goal_sigma: f64,
    pub n_samples: u32,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            p_fn: 0.10,
            p_fp: 0.02,
            goal_sigma: 1.0,
            n_samples: 5,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_fn", self.p_fn), ("p_fp", self.p_fp)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Argument(format!("{name} must be in [0, 1] (got {p})")));
            }
        }
        if !(self.goal_sigma.is_finite() && self.goal_sigma >= 0.0) {
            return Err(Error::Argument(format!(
                "goal_sigma must be >= 0 (got {})",
                self.goal_sigma
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::Argument("n_samples must be >= 1".into()));
        }
        Ok(())
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn corrupt_step(
    truth: &Frame,
    step: usize,
    params: &NoiseParams,
    goal_size: usize,
    rng: &mut Rng,
) -> PredictedFrame {
    let (h, w) = (truth.height(), truth.width());
    let mut occupancy = vec![false; h * w];
    let n = params.n_samples as usize;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let true_goal = truth.goal_center();
    let sigma = params.goal_sigma * step as f64;
    let jitter = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("finite sigma"));

    for _ in 0..n {
        for (cell, &v) in occupancy.iter_mut().zip(truth.cells()) {
            let hit = if Frame::is_obstacle_value(v) {
                !(params.p_fn > 0.0 && rng.random_bool(params.p_fn))
            } else {
                v != GOAL && params.p_fp > 0.0 && rng.random_bool(params.p_fp)
            };
            *cell |= hit;
        }
        if let Some((gx, gy)) = true_goal {
            match &jitter {
                Some(normal) => {
                    xs.push(gx + normal.sample(rng));
                    ys.push(gy + normal.sample(rng));
                }
                None => {
                    xs.push(gx);
                    ys.push(gy);
                }
            }
        }
    }
    let goal = true_goal
        .map(|_| clamp_goal_center((median(&mut xs), median(&mut ys)), h, w, goal_size));
    PredictedFrame::new(h, w, occupancy, goal).expect("dimensions match")
}

pub fn noisy_sample_predict(
    state: &WorldState,
    k: usize,
    params: &NoiseParams,
    rng: &mut Rng,
) -> Result<PredictedRollout> {
    check_horizon(k)?;
    params.validate()?;
    let goal_size = state.config.goal_size;
    let steps = true_future_frames(state, k)
        .iter()
        .enumerate()
        .map(|(i, truth)| corrupt_step(truth, i + 1, params, goal_size, rng))
        .collect();
    Ok(PredictedRollout::new(steps, "noisy", params.n_samples))
}

/// [`noisy_sample_predict`] with its own random stream.
#[derive(Clone, Debug)]
pub struct NoisySampler {
    pub params: NoiseParams,
    rng: Rng,
}

impl NoisySampler {
    pub fn new(params: NoiseParams, rng: Rng) -> Self {
        Self { params, rng }
    }

    pub fn predict(&mut self, state: &WorldState, k: usize) -> Result<PredictedRollout> {
        noisy_sample_predict(state, k, &self.params, &mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::WorldConfig;
    use crate::models::{oracle_predict, prediction_error};
    use rand::SeedableRng;

    fn state(seed: u64) -> WorldState {
        WorldState::new_episode(WorldConfig::default(), seed).unwrap()
    }

    #[test]
    fn zero_noise_equals_oracle() {
        let s = state(1);
        let params = NoiseParams {
            p_fn: 0.0,
            p_fp: 0.0,
            goal_sigma: 0.0,
            n_samples: 7,
        };
        let mut rng = Rng::seed_from_u64(3);
        let noisy = noisy_sample_predict(&s, 5, &params, &mut rng).unwrap();
        let oracle = oracle_predict(&s, 5).unwrap();
        assert_eq!(noisy.steps(), oracle.steps());
        assert_eq!(noisy.n_samples(), 7);
    }

    /// Frame whose every non-goal cell is occupied, to count FN cheaply.
    fn full_frame() -> Frame {
        Frame::from_cells(48, 48, vec![3; 48 * 48]).unwrap()
    }

    #[test]
    fn union_false_negative_rate() {
        // Closed form: a cell survives as FN only if dropped by all 5 samples.
        let expected = 0.5f64.powi(5);
        let params = NoiseParams {
            p_fn: 0.5,
            p_fp: 0.0,
            goal_sigma: 0.0,
            n_samples: 5,
        };
        let truth = full_frame();
        let mut rng = Rng::seed_from_u64(17);
        let (mut fns, mut total) = (0usize, 0usize);
        while total < 100_000 {
            let p = corrupt_step(&truth, 1, &params, 2, &mut rng);
            let e = prediction_error(&p, &truth).unwrap();
            fns += e.fn_count();
            total += 48 * 48;
        }
        let rate = fns as f64 / total as f64;
        assert!((rate - expected).abs() < 0.005, "rate {rate} vs {expected}");
    }

    #[test]
    fn union_false_positive_rate() {
        let expected = 1.0 - 0.99f64.powi(10);
        assert!((expected - 0.0956).abs() < 1e-4);
        let params = NoiseParams {
            p_fn: 0.0,
            p_fp: 0.01,
            goal_sigma: 0.0,
            n_samples: 10,
        };
        let truth = Frame::new(48, 48);
        let mut rng = Rng::seed_from_u64(18);
        let (mut fps, mut total) = (0usize, 0usize);
        while total < 100_000 {
            let p = corrupt_step(&truth, 1, &params, 2, &mut rng);
            fps += p.occupied_count();
            total += 48 * 48;
        }
        let rate = fps as f64 / total as f64;
        assert!((rate - expected).abs() < 0.005, "rate {rate} vs {expected}");
    }

    #[test]
    fn more_samples_fewer_false_negatives() {
        let truth = full_frame();
        let mut last = f64::INFINITY;
        for n in [1u32, 2, 3, 5, 10] {
            let params = NoiseParams {
                p_fn: 0.3,
                p_fp: 0.0,
                goal_sigma: 0.0,
                n_samples: n,
            };
            let mut rng = Rng::seed_from_u64(n as u64);
            let mut fns = 0usize;
            for _ in 0..5 {
                let p = corrupt_step(&truth, 1, &params, 2, &mut rng);
                fns += prediction_error(&p, &truth).unwrap().fn_count();
            }
            let rate = fns as f64 / (5 * 48 * 48) as f64;
            assert!(rate <= last + 1e-3, "n={n}: {rate} > {last}");
            last = rate;
        }
    }

    #[test]
    fn goal_is_median_and_in_bounds() {
        let s = state(4);
        let params = NoiseParams {
            p_fn: 0.0,
            p_fp: 0.0,
            goal_sigma: 30.0,
            n_samples: 5,
        };
        let mut rng = Rng::seed_from_u64(5);
        let r = noisy_sample_predict(&s, 10, &params, &mut rng).unwrap();
        for step in r.steps() {
            let (x, y) = step.goal_estimate().unwrap();
            assert!((0.5..=46.5).contains(&x) && (0.5..=46.5).contains(&y));
        }
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn invalid_params() {
        let s = state(1);
        let mut rng = Rng::seed_from_u64(1);
        let bad = NoiseParams {
            p_fn: 1.5,
            ..NoiseParams::default()
        };
        assert!(noisy_sample_predict(&s, 1, &bad, &mut rng).is_err());
        let bad = NoiseParams {
            n_samples: 0,
            ..NoiseParams::default()
        };
        assert!(noisy_sample_predict(&s, 1, &bad, &mut rng).is_err());
    }
}
