use std::collections::VecDeque;

use crate::env::Frame;
use crate::error::{Error, Result};

pub const HISTORY_LEN: usize = 4;

/// The four most recent frames, oldest first. Before four frames exist the
/// earliest one is repeated.
#[derive(Clone, Debug, PartialEq)]
pub struct History {
    frames: VecDeque<Frame>,
    t: u32,
}

impl History {
    pub fn new(initial: Frame, t: u32) -> Self {
        Self {
            frames: std::iter::repeat_n(initial, HISTORY_LEN).collect(),
            t,
        }
    }

    /// Builds a history from up to four frames, oldest first, padding at the
    /// front with the earliest one.
    pub fn from_frames(frames: Vec<Frame>, t: u32) -> Result<Self> {
        let Some(first) = frames.first().cloned() else {
            return Err(Error::Argument("history needs at least one frame".into()));
        };
        if frames.len() > HISTORY_LEN {
            return Err(Error::Argument(format!(
                "history holds {HISTORY_LEN} frames, got {}",
                frames.len()
            )));
        }
        let pad = HISTORY_LEN - frames.len();
        Ok(Self {
            frames: std::iter::repeat_n(first, pad).chain(frames).collect(),
            t,
        })
    }

    pub fn push(&mut self, frame: Frame) {
        self.frames.pop_front();
        self.frames.push_back(frame);
        self.t += 1;
    }

    pub fn frames(&self) -> impl ExactSizeIterator<Item = &Frame> {
        self.frames.iter()
    }

    pub fn get(&self, i: usize) -> &Frame {
        &self.frames[i]
    }

    pub fn latest(&self) -> &Frame {
        self.frames.back().expect("history is never empty")
    }

    pub fn t(&self) -> u32 {
        self.t
    }
}
