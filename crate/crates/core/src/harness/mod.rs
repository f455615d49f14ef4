//! Running episodes and experiments on top of the simulator, models and
//! planner: the episode loop, the benchmark grid and its G/T/D/S table,
//! JSONL traces, PPM rendering, `key = value` configuration and the
//! statistical self-checks behind `dynplan validate`.

mod bench;
mod config;
mod episode;
mod io;
mod render;
mod summary;
mod trace;
pub mod validate;

pub use bench::{run_benchmark, run_cells, BenchCell, BenchGrid, BenchRow, BenchTable, CSV_HEADER};
pub use config::{load_config, parse_config_str, ConfigEntry, RunConfig, CONFIG_KEYS};
pub use episode::{replay, run_episode, EpisodeRecord, RunOptions, StepRecord};
pub use io::write_atomic;
pub use render::{
    error_map_ppm, frame_ppm, render_error_map, render_ppm, Rgb, AGENT_RGB, CLASS_RGB, ERROR_BG_RGB,
    FN_RGB, FP_RGB, FREE_RGB, GOAL_RGB, PREDICTED_GOAL_RGB,
};
pub use summary::{summarize, Summary};
pub use trace::{read_trace, trace_lines, write_trace, TraceLine};
