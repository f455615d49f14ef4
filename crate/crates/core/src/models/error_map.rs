use super::PredictedFrame;
use crate::env::Frame;
use crate::error::{Error, Result};

/// Cell-level disagreement between a prediction and the true frame.
///
/// A false negative is a truly occupied cell predicted free, a false
/// positive a truly free cell predicted occupied. Goal pixels of the true
/// frame count as free.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorMap {
    pub height: usize,
    pub width: usize,
    /// `(row, col)` pairs, row-major order.
    pub fn_cells: Vec<(usize, usize)>,
    pub fp_cells: Vec<(usize, usize)>,
    /// Euclidean distance between goal centers, absent if either is missing.
    pub goal_err: Option<f64>,
    pub predicted_goal: Option<(f64, f64)>,
    pub true_goal: Option<(f64, f64)>,
}

impl ErrorMap {
    pub fn fn_count(&self) -> usize {
        self.fn_cells.len()
    }

    pub fn fp_count(&self) -> usize {
        self.fp_cells.len()
    }

    pub fn is_exact(&self) -> bool {
        self.fn_cells.is_empty() && self.fp_cells.is_empty() && self.goal_err.unwrap_or(0.0) == 0.0
    }
}

pub fn prediction_error(predicted: &PredictedFrame, truth: &Frame) -> Result<ErrorMap> {
    if predicted.height() != truth.height() || predicted.width() != truth.width() {
        return Err(Error::Argument(format!(
            "prediction is {}x{}, truth is {}x{}",
            predicted.height(),
            predicted.width(),
            truth.height(),
            truth.width()
        )));
    }
    let width = truth.width();
    let mut fn_cells = Vec::new();
    let mut fp_cells = Vec::new();
    for (i, (&pred, &v)) in predicted.occupancy().iter().zip(truth.cells()).enumerate() {
        let actual = Frame::is_obstacle_value(v);
        if actual && !pred {
            fn_cells.push((i / width, i % width));
        } else if pred && !actual {
            fp_cells.push((i / width, i % width));
        }
    }
    let true_goal = truth.goal_center();
    let predicted_goal = predicted.goal_estimate();
    let goal_err = match (true_goal, predicted_goal) {
        (Some(a), Some(b)) => Some((a.0 - b.0).hypot(a.1 - b.1)),
        _ => None,
    };
    Ok(ErrorMap {
        height: truth.height(),
        width,
        fn_cells,
        fp_cells,
        goal_err,
        predicted_goal,
        true_goal,
    })
}
