use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::env::{SpeedPreset, WorldConfig};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::planner::MctsConfig;
use crate::rng::episode_seed;

use super::{run_episode, summarize, write_atomic, EpisodeRecord, RunOptions, Summary};

/// Cartesian product of models, speeds and rollout lengths to evaluate.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchGrid {
    pub models: Vec<ModelSpec>,
    pub rollout_lengths: Vec<usize>,
    pub speeds: Vec<SpeedPreset>,
}

impl BenchGrid {
    /// Cells in row order: model, then speed, then `k`.
    pub fn cells(&self) -> Vec<BenchCell> {
        let mut out = Vec::new();
        for &model in &self.models {
            for &speed in &self.speeds {
                if model.is_planning() {
                    for &k in &self.rollout_lengths {
                        out.push(BenchCell { model, speed, k });
                    }
                } else {
                    // The random policy does not plan, so k is meaningless.
                    out.push(BenchCell { model, speed, k: 0 });
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.models.is_empty() || self.speeds.is_empty() {
            return Err(Error::Argument("benchmark grid needs at least one model and speed".into()));
        }
        if self.models.iter().any(|m| m.is_planning()) && self.rollout_lengths.is_empty() {
            return Err(Error::Argument("benchmark grid needs at least one rollout length".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchCell {
    pub model: ModelSpec,
    pub speed: SpeedPreset,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub cell: BenchCell,
    pub summary: Summary,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

pub const CSV_HEADER: [&str; 10] = [
    "model", "n_samples", "speed", "k", "G", "T", "D", "S_mean", "S_std", "episodes",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_default()
}

impl BenchTable {
    pub fn get(&self, model: &ModelSpec, speed: SpeedPreset, k: usize) -> Option<&Summary> {
        self.rows
            .iter()
            .find(|r| r.cell.model == *model && r.cell.speed == speed && r.cell.k == k)
            .map(|r| &r.summary)
    }

    fn record(row: &BenchRow) -> [String; 10] {
        let s = &row.summary;
        [
            row.cell.model.to_string(),
            row.cell.model.n_samples().to_string(),
            row.cell.speed.to_string(),
            row.cell.k.to_string(),
            s.goals.to_string(),
            s.timeouts.to_string(),
            s.deaths.to_string(),
            opt(s.s_mean),
            opt(s.s_std),
            s.episodes.to_string(),
        ]
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.write_record(Self::record(row))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::State(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::State(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv()?.as_bytes())
    }

    /// Column-aligned plain text rendering.
    pub fn to_text(&self) -> String {
        let mut cells: Vec<Vec<String>> = vec![CSV_HEADER.iter().map(|s| s.to_string()).collect()];
        cells.extend(self.rows.iter().map(|r| Self::record(r).to_vec()));
        for c in cells.iter_mut().skip(1).flat_map(|r| r.iter_mut()) {
            if c.is_empty() {
                *c = "-".into();
            }
        }
        let widths: Vec<usize> = (0..CSV_HEADER.len())
            .map(|i| cells.iter().map(|r| r[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

/// Runs every cell of the grid on the same episode seeds and keeps the
/// per-episode records. `parallelism == 0` uses all available cores.
pub fn run_cells(
    base_world: &WorldConfig,
    base_mcts: &MctsConfig,
    grid: &BenchGrid,
    n_episodes: usize,
    master_seed: u64,
    parallelism: usize,
) -> Result<Vec<(BenchCell, Vec<EpisodeRecord>)>> {
    grid.validate()?;
    if n_episodes == 0 {
        return Err(Error::Argument("n_episodes must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::State(format!("thread pool: {e}")))?;
    let seeds: Vec<u64> = (0..n_episodes as u64).map(|i| episode_seed(master_seed, i)).collect();
    let cells = grid.cells();

    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| seeds.iter().map(move |&s| (c, s)))
        .collect();
    let configs: Vec<(WorldConfig, MctsConfig)> = cells
        .iter()
        .map(|c| {
            let mut w = base_world.clone();
            w.apply_speed(c.speed);
            let mcts = MctsConfig {
                rollout_length: c.k.max(1),
                ..base_mcts.clone()
            };
            (w, mcts)
        })
        .collect();
    for (w, m) in &configs {
        w.validate()?;
        m.validate()?;
    }

    let records: Vec<EpisodeRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, seed)| {
                let (w, m) = &configs[c];
                run_episode(w, m, cells[c].model, seed, RunOptions::default())
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut it = records.into_iter();
    Ok(cells
        .into_iter()
        .map(|cell| (cell, it.by_ref().take(n_episodes).collect()))
        .collect())
}

pub fn run_benchmark(
    base_world: &WorldConfig,
    base_mcts: &MctsConfig,
    grid: &BenchGrid,
    n_episodes: usize,
    master_seed: u64,
    parallelism: usize,
) -> Result<BenchTable> {
    let rows = run_cells(base_world, base_mcts, grid, n_episodes, master_seed, parallelism)?
        .into_iter()
        .map(|(cell, recs)| Ok(BenchRow { cell, summary: summarize(&recs)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchTable { rows })
}
