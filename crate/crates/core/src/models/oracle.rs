use super::{check_horizon, true_future_frames, PredictedFrame, PredictedRollout};
use crate::env::WorldState;
use crate::error::Result;

/// Clairvoyant model: clones the hidden state, RNG included, and steps it.
/// Future arrivals are therefore predicted exactly.
pub fn oracle_predict(state: &WorldState, k: usize) -> Result<PredictedRollout> {
    check_horizon(k)?;
    let steps = true_future_frames(state, k)
        .iter()
        .map(PredictedFrame::from_frame)
        .collect();
    Ok(PredictedRollout::new(steps, "oracle", 1))
}
