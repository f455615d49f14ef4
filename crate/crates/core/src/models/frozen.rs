use super::{check_horizon, History, ObservationModel, PredictedFrame, PredictedRollout};
use crate::error::Result;

/// Persistence baseline: the latest frame repeated `k` times.
pub fn frozen_predict(history: &History, k: usize) -> Result<PredictedRollout> {
    check_horizon(k)?;
    let last = PredictedFrame::from_frame(history.latest());
    Ok(PredictedRollout::new(vec![last; k], "frozen", 1))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FrozenModel;

impl ObservationModel for FrozenModel {
    fn name(&self) -> &str {
        "frozen"
    }

    fn predict(&self, history: &History, k: usize) -> Result<PredictedRollout> {
        frozen_predict(history, k)
    }
}
