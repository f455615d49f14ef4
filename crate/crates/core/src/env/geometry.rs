use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NUM_ACTIONS: usize = 8;

/// Unit vectors for the eight actions, counter-clockwise from +x in
/// (x, row) coordinates, so action 2 moves towards larger row indices.
const DIRECTIONS: [(f64, f64); NUM_ACTIONS] = [
    (1.0, 0.0),
    (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (0.0, 1.0),
    (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (-1.0, 0.0),
    (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    (0.0, -1.0),
    (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

/// One of eight equally spaced headings, `index · 45°`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Action(u8);

impl Action {
    pub const ALL: [Action; NUM_ACTIONS] = [
        Action(0),
        Action(1),
        Action(2),
        Action(3),
        Action(4),
        Action(5),
        Action(6),
        Action(7),
    ];

    pub fn new(index: usize) -> Result<Self> {
        if index < NUM_ACTIONS {
            Ok(Action(index as u8))
        } else {
            Err(Error::Argument(format!(
                "action {index} out of range 0..{NUM_ACTIONS}"
            )))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn angle(self) -> f64 {
        self.0 as f64 * std::f64::consts::FRAC_PI_4
    }

    pub fn velocity(self, speed: f64) -> (f64, f64) {
        let (ux, uy) = DIRECTIONS[self.index()];
        (speed * ux, speed * uy)
    }
}

impl TryFrom<u8> for Action {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        Action::new(v as usize)
    }
}

impl From<Action> for u8 {
    fn from(a: Action) -> u8 {
        a.0
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `(speed·cos(a·45°), speed·sin(a·45°))`, exact on the axes.
pub fn action_to_velocity(action: usize, speed: f64) -> Result<(f64, f64)> {
    Ok(Action::new(action)?.velocity(speed))
}

/// Nearest pixel, ties away from zero.
#[inline]
pub fn round_px(v: f64) -> i64 {
    v.round() as i64
}

/// Folds `pos` into `[0, max]` by mirroring at both walls. Returns the folded
/// position and whether the velocity sign flips (odd number of bounces).
pub fn fold_reflect(mut pos: f64, max: f64) -> (f64, bool) {
    if max <= 0.0 {
        return (0.0, false);
    }
    let mut flipped = false;
    loop {
        if pos < 0.0 {
            pos = -pos;
        } else if pos > max {
            pos = 2.0 * max - pos;
        } else {
            return (pos, flipped);
        }
        flipped = !flipped;
    }
}

/// Top-left pixel of a `size × size` footprint whose centroid is `center`.
pub fn goal_footprint_origin(center: (f64, f64), size: usize) -> (i64, i64) {
    let half = (size as f64 - 1.0) / 2.0;
    (round_px(center.0 - half), round_px(center.1 - half))
}
