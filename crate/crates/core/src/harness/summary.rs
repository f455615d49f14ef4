use crate::env::OutcomeKind;
use crate::error::{Error, Result};

use super::EpisodeRecord;

/// Goal / timeout / death counts plus step statistics over the episodes the
/// agent survived (goal or timeout). `s_mean`/`s_std` are absent when every
/// episode ended in death; `s_std` is the population deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub goals: usize,
    pub timeouts: usize,
    pub deaths: usize,
    pub s_mean: Option<f64>,
    pub s_std: Option<f64>,
    pub episodes: usize,
}

pub fn summarize(records: &[EpisodeRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::Argument("cannot summarize zero episodes".into()));
    }
    let count = |k: OutcomeKind| records.iter().filter(|r| r.outcome.kind == k).count();
    let survived: Vec<f64> = records
        .iter()
        .filter(|r| matches!(r.outcome.kind, OutcomeKind::GoalReached | OutcomeKind::TimedOut))
        .map(|r| r.steps as f64)
        .collect();
    let (s_mean, s_std) = if survived.is_empty() {
        (None, None)
    } else {
        let n = survived.len() as f64;
        let mean = survived.iter().sum::<f64>() / n;
        let var = survived.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
        (Some(mean), Some(var.sqrt()))
    };
    let summary = Summary {
        goals: count(OutcomeKind::GoalReached),
        timeouts: count(OutcomeKind::TimedOut),
        deaths: count(OutcomeKind::Died),
        s_mean,
        s_std,
        episodes: records.len(),
    };
    if summary.goals + summary.timeouts + summary.deaths != summary.episodes {
        return Err(Error::State("summarized an unfinished episode".into()));
    }
    Ok(summary)
}
