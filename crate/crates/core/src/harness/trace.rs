use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{Action, OutcomeKind, WorldState};
use crate::error::{Error, Result};

use super::{write_atomic, EpisodeRecord};

/// One line of a JSONL episode trace; the frame is the one after the step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub t: u32,
    pub agent_pos: [f64; 2],
    pub action: Action,
    pub reward: f64,
    pub outcome: OutcomeKind,
    pub frame_rle: String,
}

/// Trace lines for a record. Frames are re-simulated from the seed when the
/// record did not keep them.
pub fn trace_lines(record: &EpisodeRecord) -> Result<Vec<TraceLine>> {
    let frames = match &record.frames {
        Some(f) => f[1..].iter().map(|f| f.to_rle()).collect(),
        None => {
            let mut world = WorldState::new_episode(record.world.clone(), record.episode_seed)?;
            record
                .trace
                .iter()
                .map(|s| {
                    world.step_agent(s.action)?;
                    Ok(world.render_frame().to_rle())
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    if frames.len() != record.trace.len() {
        return Err(Error::State("trace and frame counts differ".into()));
    }
    Ok(record
        .trace
        .iter()
        .zip(frames)
        .map(|(s, frame_rle)| TraceLine {
            t: s.t,
            agent_pos: [s.agent_pos.0, s.agent_pos.1],
            action: s.action,
            reward: s.reward,
            outcome: s.outcome,
            frame_rle,
        })
        .collect())
}

pub fn write_trace(record: &EpisodeRecord, path: &Path) -> Result<()> {
    let mut out = String::new();
    for line in trace_lines(record)? {
        let _ = writeln!(out, "{}", serde_json::to_string(&line)?);
    }
    write_atomic(path, out.as_bytes())
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceLine>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })
        })
        .collect()
}
