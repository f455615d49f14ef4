use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dynplan::env::{Action, SpeedPreset, WorldState};
use dynplan::harness::{
    self, load_config, read_trace, render_error_map, render_ppm, run_benchmark, run_episode,
    write_trace, BenchGrid, ConfigEntry, RunConfig, RunOptions,
};
use dynplan::models::{prediction_error, true_future_frames, Forecaster, History, ModelSpec};
use dynplan::rng::episode_seed;

const OUT_DIR_ENV: &str = "DYNPLAN_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "dynplan", version, about = "Plan through forecast obstacle fields with PUCT search")]
struct Cli {
    /// `key = value` config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: $DYNPLAN_OUT_DIR, else ./dynplan-out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(flatten)]
    keys: ConfigFlags,

    #[command(subcommand)]
    command: Command,
}

/// One flag per config key, kept as text so the config parser reports errors.
#[derive(Args, Debug, Default)]
struct ConfigFlags {
    #[arg(long, global = true)]
    speed: Option<String>,
    #[arg(long, global = true)]
    grid_h: Option<String>,
    #[arg(long, global = true)]
    grid_w: Option<String>,
    #[arg(long, global = true)]
    level: Option<String>,
    #[arg(long, global = true)]
    spawn_base_rate: Option<String>,
    /// Comma-separated lane rows, or `none`.
    #[arg(long, global = true)]
    lane_rows: Option<String>,
    #[arg(long, global = true)]
    goal_speed: Option<String>,
    #[arg(long, global = true)]
    goal_size: Option<String>,
    #[arg(long, global = true)]
    agent_speed: Option<String>,
    #[arg(long, global = true)]
    max_steps: Option<String>,
    #[arg(long, global = true)]
    master_seed: Option<String>,
    #[arg(long, global = true)]
    warmup_steps: Option<String>,
    #[arg(long, global = true)]
    n_rollouts: Option<String>,
    #[arg(long, global = true)]
    rollout_length: Option<String>,
    #[arg(long, global = true)]
    temperature: Option<String>,
    #[arg(long, global = true)]
    c_puct: Option<String>,
    #[arg(long, global = true)]
    prior_kappa: Option<String>,
    #[arg(long, global = true)]
    shaping_beta: Option<String>,
    #[arg(long, global = true)]
    death_value: Option<String>,
    #[arg(long, global = true)]
    goal_value: Option<String>,
    /// oracle | frozen | velocity | noisy[:p_fn,p_fp,sigma,n] | none.
    /// Repeat for `bench` to compare several models.
    #[arg(long, global = true)]
    model: Vec<String>,
    /// Warn about settings outside the reference presets.
    #[arg(long, global = true)]
    strict_presets: bool,
}

impl ConfigFlags {
    fn entries(&self) -> Vec<ConfigEntry> {
        let pairs = [
            ("speed", &self.speed),
            ("grid_h", &self.grid_h),
            ("grid_w", &self.grid_w),
            ("level", &self.level),
            ("spawn_base_rate", &self.spawn_base_rate),
            ("lane_rows", &self.lane_rows),
            ("goal_speed", &self.goal_speed),
            ("goal_size", &self.goal_size),
            ("agent_speed", &self.agent_speed),
            ("max_steps", &self.max_steps),
            ("master_seed", &self.master_seed),
            ("warmup_steps", &self.warmup_steps),
            ("n_rollouts", &self.n_rollouts),
            ("rollout_length", &self.rollout_length),
            ("temperature", &self.temperature),
            ("c_puct", &self.c_puct),
            ("prior_kappa", &self.prior_kappa),
            ("shaping_beta", &self.shaping_beta),
            ("death_value", &self.death_value),
            ("goal_value", &self.goal_value),
        ];
        let mut out: Vec<ConfigEntry> = pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| ConfigEntry::flag(k, v.clone())))
            .collect();
        if let Some(m) = self.model.last() {
            out.push(ConfigEntry::flag("model", m.clone()));
        }
        if self.strict_presets {
            out.push(ConfigEntry::flag("strict_presets", "true"));
        }
        out
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play one episode and write its JSONL trace.
    Play {
        /// Episode index under the master seed.
        #[arg(long, default_value_t = 0)]
        episode: u64,
        /// Explicit episode seed, overriding --episode.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write one PPM per step.
        #[arg(long)]
        dump_frames: bool,
    },
    /// Evaluate models x rollout lengths x speeds on shared episodes.
    Bench {
        /// Rollout lengths, comma-separated (default: the configured one).
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        /// Speed presets, comma-separated (default: the configured one).
        #[arg(long, value_delimiter = ',')]
        speeds: Vec<String>,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        /// Worker threads, 0 for all cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Render true frame, model prediction and error map at a decision step.
    Render {
        #[arg(long, default_value_t = 0)]
        episode: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Trace from `play` supplying the agent's moves; without one the
        /// agent is left where it was placed.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Decision step.
        #[arg(long, default_value_t = 0)]
        step: u32,
        /// Prediction horizon in steps (>= 1).
        #[arg(long, default_value_t = 1)]
        horizon: usize,
    },
    /// Run the statistical self-checks.
    Validate,
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("dynplan-out"))
}

fn seed_for(cfg: &RunConfig, episode: u64, seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| episode_seed(cfg.world.master_seed, episode))
}

fn play(cfg: &RunConfig, out: &Path, seed: u64, dump_frames: bool) -> Result<()> {
    let rec = run_episode(
        &cfg.world,
        &cfg.mcts,
        cfg.model,
        seed,
        RunOptions {
            keep_frames: dump_frames,
        },
    )?;
    let trace_path = out.join(format!("trace_{seed:016x}.jsonl"));
    write_trace(&rec, &trace_path)?;
    if let Some(frames) = &rec.frames {
        let start = WorldState::new_episode(cfg.world.clone(), seed)?.agent.pos;
        let positions = std::iter::once(start).chain(rec.trace.iter().map(|s| s.agent_pos));
        for (i, (frame, pos)) in frames.iter().zip(positions).enumerate() {
            render_ppm(frame, Some(pos), &out.join(format!("frame_{seed:016x}_{i:04}.ppm")))?;
        }
    }
    println!(
        "seed {seed:#018x} model {} outcome {} after {} steps, reward {}, model calls {}",
        rec.model,
        rec.outcome.kind.as_str(),
        rec.steps,
        rec.outcome.reward,
        rec.model_calls
    );
    println!("trace written to {}", trace_path.display());
    Ok(())
}

fn bench(
    cfg: &RunConfig,
    models: &[String],
    out: &Path,
    ks: Vec<usize>,
    speeds: &[String],
    episodes: usize,
    jobs: usize,
) -> Result<()> {
    let models = if models.is_empty() {
        vec![cfg.model]
    } else {
        models
            .iter()
            .map(|m| m.parse::<ModelSpec>().with_context(|| format!("--model {m}")))
            .collect::<Result<_>>()?
    };
    let speeds = if speeds.is_empty() {
        match cfg.world.speed_preset() {
            Some(p) => vec![p],
            None => bail!("agent_speed {} is not a preset; pass --speeds", cfg.world.agent_speed),
        }
    } else {
        speeds
            .iter()
            .map(|s| s.parse::<SpeedPreset>().map_err(Into::into))
            .collect::<Result<_>>()?
    };
    let rollout_lengths = if ks.is_empty() { vec![cfg.mcts.rollout_length] } else { ks };
    let grid = BenchGrid {
        models,
        rollout_lengths,
        speeds,
    };
    let table = run_benchmark(&cfg.world, &cfg.mcts, &grid, episodes, cfg.world.master_seed, jobs)?;
    let csv_path = out.join("bench.csv");
    table.write_csv(&csv_path)?;
    print!("{}", table.to_text());
    println!("csv written to {}", csv_path.display());
    Ok(())
}

fn render(cfg: &RunConfig, out: &Path, seed: u64, trace: Option<&Path>, step: u32, k: usize) -> Result<()> {
    if !cfg.model.is_planning() {
        bail!("render needs a forward model, not {}", cfg.model);
    }
    let actions: Option<Vec<Action>> = match trace {
        Some(p) => Some(read_trace(p)?.into_iter().map(|l| l.action).collect()),
        None => None,
    };
    let mut state = WorldState::new_episode(cfg.world.clone(), seed)?;
    let mut history = History::new(state.render_frame(), 0);
    for i in 0..step as usize {
        match actions.as_ref().map(|a| a.get(i)) {
            Some(Some(&a)) => {
                if state.step_agent(a)?.kind.is_terminal() {
                    bail!("episode ended at step {}, before step {step}", i + 1);
                }
            }
            Some(None) => bail!("trace has {} steps, fewer than {step}", i),
            None => {
                state.step_world();
            }
        }
        history.push(state.render_frame());
    }
    let mut forecaster = Forecaster::new(cfg.model, seed);
    let rollout = forecaster.predict(&state, &history, k)?;
    let truth = true_future_frames(&state, k)
        .pop()
        .context("empty horizon")?;
    let pred = &rollout.steps()[k - 1];
    let err = prediction_error(pred, &truth)?;
    let gs = cfg.world.goal_size;
    let stem = format!("render_{seed:016x}_t{step}_k{k}");
    let paths = [
        out.join(format!("{stem}_truth.ppm")),
        out.join(format!("{stem}_{}.ppm", cfg.model.name())),
        out.join(format!("{stem}_error.ppm")),
    ];
    render_ppm(&truth, Some(state.agent.pos), &paths[0])?;
    render_ppm(&pred.to_frame(gs), Some(state.agent.pos), &paths[1])?;
    render_error_map(&err, &truth, gs, &paths[2])?;
    let goal_err = err.goal_err.map_or("absent".to_string(), |g| format!("{g:.3}"));
    println!(
        "t={step} k={k} model {}: FN {} FP {} goal error {goal_err}",
        cfg.model,
        err.fn_count(),
        err.fp_count()
    );
    for p in &paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn validate(cfg: &RunConfig) -> Result<bool> {
    let results = harness::validate::run_all(&cfg.world, &cfg.mcts, cfg.world.master_seed)?;
    for r in &results {
        println!("{r}");
    }
    Ok(results.iter().all(|r| r.passed))
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = load_config(cli.config.as_deref(), &cli.keys.entries())?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let out = out_dir(cli.out_dir);
    match cli.command {
        Command::Play {
            episode,
            seed,
            dump_frames,
        } => {
            if cli.keys.model.len() > 1 {
                bail!("play takes a single --model");
            }
            play(&cfg, &out, seed_for(&cfg, episode, seed), dump_frames)?;
        }
        Command::Bench {
            k,
            speeds,
            episodes,
            jobs,
        } => bench(&cfg, &cli.keys.model, &out, k, &speeds, episodes, jobs)?,
        Command::Render {
            episode,
            seed,
            trace,
            step,
            horizon,
        } => render(&cfg, &out, seed_for(&cfg, episode, seed), trace.as_deref(), step, horizon)?,
        Command::Validate => return validate(&cfg),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
