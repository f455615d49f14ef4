//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng as _, SeedableRng};

use dynplan::env::{Action, Frame, OutcomeKind, SpeedPreset, WorldConfig, WorldState, NUM_ACTIONS};
use dynplan::harness::validate::{goal_speed, spawn_rate, visit_conservation};
use dynplan::harness::{
    replay, run_cells, run_episode, summarize, BenchCell, BenchGrid, BenchRow, BenchTable,
    EpisodeRecord, RunOptions, Summary,
};
use dynplan::models::{
    noisy_sample_predict, oracle_predict, prediction_error, velocity_predict, History, ModelSpec,
    NoiseParams,
};
use dynplan::planner::MctsConfig;
use dynplan::rng::{episode_seed, Rng};

const EPISODES: usize = 100;
// The default configuration's master seed.
const MASTER_SEED: u64 = 0;
const ALL_K: [usize; 4] = [1, 3, 5, 10];

struct Criterion {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

type Cells = Vec<(BenchCell, Vec<EpisodeRecord>)>;

fn noisy(n_samples: u32) -> ModelSpec {
    ModelSpec::Noisy(NoiseParams {
        p_fn: 0.10,
        p_fp: 0.02,
        goal_sigma: 1.0,
        n_samples,
    })
}

fn grids() -> [BenchGrid; 3] {
    [
        BenchGrid {
            models: vec![ModelSpec::Oracle],
            rollout_lengths: ALL_K.to_vec(),
            speeds: vec![SpeedPreset::Double, SpeedPreset::Same],
        },
        BenchGrid {
            models: vec![ModelSpec::Velocity, noisy(5), noisy(1), ModelSpec::Frozen],
            rollout_lengths: vec![3],
            speeds: vec![SpeedPreset::Double],
        },
        BenchGrid {
            models: vec![ModelSpec::Random],
            rollout_lengths: vec![],
            speeds: vec![SpeedPreset::Double, SpeedPreset::Same],
        },
    ]
}

fn run_all_cells(parallelism: usize) -> Cells {
    let world = WorldConfig::default();
    let mcts = MctsConfig::default();
    grids()
        .iter()
        .flat_map(|g| run_cells(&world, &mcts, g, EPISODES, MASTER_SEED, parallelism).unwrap())
        .collect()
}

fn table(cells: &Cells) -> BenchTable {
    BenchTable {
        rows: cells
            .iter()
            .map(|(cell, recs)| BenchRow {
                cell: *cell,
                summary: summarize(recs).unwrap(),
            })
            .collect(),
    }
}

fn get(t: &BenchTable, m: ModelSpec, speed: SpeedPreset, k: usize) -> &Summary {
    t.get(&m, speed, k)
        .unwrap_or_else(|| panic!("missing cell {m} {speed} k={k}"))
}

fn gtd(s: &Summary) -> String {
    format!("{}/{}/{}", s.goals, s.timeouts, s.deaths)
}

fn oracle_upper_bound(t: &BenchTable) -> Criterion {
    let cells: Vec<_> = [1, 3]
        .iter()
        .map(|&k| (k, get(t, ModelSpec::Oracle, SpeedPreset::Double, k)))
        .collect();
    Criterion {
        id: 1,
        name: "oracle upper bound (2x, k in {1,3}: G >= 95, D <= 1)",
        passed: cells.iter().all(|(_, s)| s.goals >= 95 && s.deaths <= 1),
        detail: cells
            .iter()
            .map(|(k, s)| format!("k={k} G/T/D {}", gtd(s)))
            .collect::<Vec<_>>()
            .join(", "),
    }
}

fn random_baseline(t: &BenchTable) -> Criterion {
    let fast = get(t, ModelSpec::Random, SpeedPreset::Double, 0);
    let slow = get(t, ModelSpec::Random, SpeedPreset::Same, 0);
    Criterion {
        id: 2,
        name: "random baseline (G <= 5 at 2x, G <= 2 at 1x)",
        passed: fast.goals <= 5 && slow.goals <= 2,
        detail: format!("2x G/T/D {}, 1x G/T/D {}", gtd(fast), gtd(slow)),
    }
}

fn model_ordering(t: &BenchTable) -> Criterion {
    let order = [
        ModelSpec::Oracle,
        ModelSpec::Velocity,
        noisy(5),
        ModelSpec::Frozen,
        ModelSpec::Random,
    ];
    let goals: Vec<usize> = order
        .iter()
        .map(|&m| {
            let k = if m.is_planning() { 3 } else { 0 };
            get(t, m, SpeedPreset::Double, k).goals
        })
        .collect();
    let ordered = goals.windows(2).all(|w| w[0] >= w[1]);
    let gap = goals[0] as i64 - goals[4] as i64;
    Criterion {
        id: 3,
        name: "model ordering (2x, k=3: oracle >= velocity >= noisy5 >= frozen >= random, gap >= 50)",
        passed: ordered && gap >= 50,
        detail: format!("G = {goals:?}, oracle - random = {gap}"),
    }
}

/// A mid-episode state reached by random world steps, with the history of
/// frames an observer would hold at that point.
fn observed_state(seed: u64, rng: &mut Rng) -> (WorldState, History) {
    let mut state = WorldState::new_episode(WorldConfig::default(), seed).unwrap();
    let mut history = History::new(state.render_frame(), 0);
    for _ in 0..rng.random_range(4..40) {
        state.step_world();
        history.push(state.render_frame());
    }
    (state, history)
}

/// Truth frames by stepping an independent copy of the world.
fn future(state: &WorldState, k: usize) -> Vec<Frame> {
    let mut sim = state.clone();
    (0..k)
        .map(|_| {
            sim.step_world();
            sim.render_frame()
        })
        .collect()
}

fn sample_aggregation(t: &BenchTable) -> Criterion {
    let params = NoiseParams {
        p_fn: 0.10,
        p_fp: 0.02,
        goal_sigma: 1.0,
        n_samples: 5,
    };
    let expected = params.p_fn.powi(params.n_samples as i32);
    let mut rng = Rng::seed_from_u64(41);
    let (mut occupied, mut missed, mut i) = (0u64, 0u64, 0u64);
    while occupied < 100_000 {
        let (state, _) = observed_state(episode_seed(MASTER_SEED ^ 4, i), &mut rng);
        let rollout = noisy_sample_predict(&state, 3, &params, &mut rng).unwrap();
        for (pred, truth) in rollout.steps().iter().zip(future(&state, 3)) {
            for (j, &v) in truth.cells().iter().enumerate() {
                if Frame::is_obstacle_value(v) {
                    occupied += 1;
                    missed += !pred.occupancy()[j] as u64;
                }
            }
        }
        i += 1;
    }
    let rate = missed as f64 / occupied as f64;
    let d5 = get(t, noisy(5), SpeedPreset::Double, 3).deaths;
    let d1 = get(t, noisy(1), SpeedPreset::Double, 3).deaths;
    Criterion {
        id: 4,
        name: "sample aggregation (FN rate at n=5 = p_fn^5 +- 0.005; D(n=5) <= D(n=1))",
        passed: (rate - expected).abs() <= 0.005 && d5 <= d1,
        detail: format!(
            "FN rate {rate:.6} vs {expected:.6} over {occupied} occupied cells; D n=5 {d5}, n=1 {d1}"
        ),
    }
}

fn speed_effect(t: &BenchTable) -> Criterion {
    let pairs: Vec<(usize, usize, usize)> = ALL_K
        .iter()
        .map(|&k| {
            (
                k,
                get(t, ModelSpec::Oracle, SpeedPreset::Double, k).goals,
                get(t, ModelSpec::Oracle, SpeedPreset::Same, k).goals,
            )
        })
        .collect();
    Criterion {
        id: 5,
        name: "speed effect (oracle G at 2x > G at 1x for every k)",
        passed: pairs.iter().all(|(_, fast, slow)| fast > slow),
        detail: pairs
            .iter()
            .map(|(k, f, s)| format!("k={k} {f} vs {s}"))
            .collect::<Vec<_>>()
            .join(", "),
    }
}

fn oracle_exactness() -> Criterion {
    let mut rng = Rng::seed_from_u64(6);
    let (mut fn_total, mut fp_total, mut goal_bad, mut frames) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..1_000u64 {
        let (mut state, _) = observed_state(episode_seed(MASTER_SEED ^ 6, i), &mut rng);
        let k = rng.random_range(1..=10usize);
        let rollout = oracle_predict(&state, k).unwrap();
        // Compare against the episode actually played on with random moves.
        for pred in rollout.steps() {
            let a = Action::ALL[rng.random_range(0..NUM_ACTIONS)];
            let done = state.step_agent(a).unwrap().kind.is_terminal();
            let err = prediction_error(pred, &state.render_frame()).unwrap();
            fn_total += err.fn_count();
            fp_total += err.fp_count();
            goal_bad += (err.goal_err != Some(0.0)) as usize;
            frames += 1;
            if done {
                break;
            }
        }
    }
    Criterion {
        id: 6,
        name: "oracle exactness (1000 pairs, k <= 10: zero FN, FP, goal error)",
        passed: fn_total == 0 && fp_total == 0 && goal_bad == 0,
        detail: format!("{frames} frames: FN {fn_total}, FP {fp_total}, goal mismatches {goal_bad}"),
    }
}

fn horizon_degradation() -> Criterion {
    let mut rng = Rng::seed_from_u64(7);
    let (mut first, mut last) = (0usize, 0usize);
    let n = 100u64;
    for i in 0..n {
        let (state, history) = observed_state(episode_seed(MASTER_SEED ^ 7, i), &mut rng);
        let rollout = velocity_predict(&history, 10).unwrap();
        let truth = future(&state, 10);
        first += prediction_error(&rollout.steps()[0], &truth[0]).unwrap().fn_count();
        last += prediction_error(&rollout.steps()[9], &truth[9]).unwrap().fn_count();
    }
    let (m1, m10) = (first as f64 / n as f64, last as f64 / n as f64);
    Criterion {
        id: 7,
        name: "horizon degradation (velocity mean FN at step 10 > step 1)",
        passed: m10 > m1,
        detail: format!("mean FN step 1 = {m1:.2}, step 10 = {m10:.2} over {n} states"),
    }
}

fn determinism(serial: &Cells, parallel: &Cells) -> Criterion {
    let (mut replayed, mut mismatched) = (0usize, 0usize);
    for (_, recs) in serial {
        for rec in recs.iter().take(10) {
            let outcomes = replay(&rec.world, rec.episode_seed, &rec.actions()).unwrap();
            let rewards_match = outcomes
                .iter()
                .zip(&rec.trace)
                .all(|(o, s)| o.reward == s.reward && o.kind == s.outcome);
            replayed += 1;
            mismatched += (outcomes.last() != Some(&rec.outcome) || !rewards_match) as usize;
        }
    }
    let a = table(serial).to_csv().unwrap();
    let b = table(parallel).to_csv().unwrap();
    Criterion {
        id: 8,
        name: "determinism and replay (replays exact; CSV at parallelism 1 == 8)",
        passed: mismatched == 0 && a.as_bytes() == b.as_bytes(),
        detail: format!(
            "{replayed} replays, {mismatched} mismatched; CSV {} bytes, identical: {}",
            a.len(),
            a == b
        ),
    }
}

fn statistics() -> Criterion {
    let cfg = WorldConfig::default();
    let checks = [
        spawn_rate(&cfg, 100_000, MASTER_SEED, 0.02).unwrap(),
        goal_speed(&cfg, 10_000, MASTER_SEED, 1e-9).unwrap(),
        visit_conservation(&cfg, &MctsConfig::default(), 1_000, MASTER_SEED).unwrap(),
    ];
    Criterion {
        id: 9,
        name: "statistical properties (spawn rate 2%, goal speed 1e-9, visit conservation)",
        passed: checks.iter().all(|c| c.passed),
        detail: checks
            .iter()
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn call_economy() -> Criterion {
    let world = WorldConfig::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for n_rollouts in [1, 100, 1000] {
        let mcts = MctsConfig {
            n_rollouts,
            ..MctsConfig::default()
        };
        let k = mcts.rollout_length as u64;
        let (mut decisions, mut calls, mut frames) = (0, 0, 0);
        for model in [ModelSpec::Oracle, noisy(5), ModelSpec::Velocity] {
            for i in 0..3 {
                let rec = run_episode(&world, &mcts, model, episode_seed(MASTER_SEED, i), RunOptions::default())
                    .unwrap();
                decisions += rec.decisions;
                calls += rec.model_calls;
                frames += rec.frames_generated;
            }
        }
        ok &= calls == decisions && frames == decisions * k;
        lines.push(format!("n_rollouts={n_rollouts}: {calls} calls, {frames} frames, {decisions} decisions"));
    }
    Criterion {
        id: 10,
        name: "model-call economy (one k-step rollout per decision)",
        passed: ok,
        detail: lines.join("; "),
    }
}

fn main() -> ExitCode {
    assert_eq!(MASTER_SEED, WorldConfig::default().master_seed);
    let start = Instant::now();
    let serial = run_all_cells(1);
    let bench_secs = start.elapsed().as_secs_f64();
    let parallel = run_all_cells(8);
    let t = table(&serial);
    for (cell, recs) in &serial {
        for r in recs {
            assert!(r.outcome.kind != OutcomeKind::Running && r.steps <= r.world.max_steps, "{cell:?}");
        }
    }
    print!("{}", t.to_text());
    println!("benchmark: {bench_secs:.1}s serial");

    let criteria = [
        oracle_upper_bound(&t),
        random_baseline(&t),
        model_ordering(&t),
        sample_aggregation(&t),
        speed_effect(&t),
        oracle_exactness(),
        horizon_degradation(),
        determinism(&serial, &parallel),
        statistics(),
        call_economy(),
    ];
    let mut failed = 0;
    for c in &criteria {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {:>2}: {} -- {}", c.id, c.name, c.detail);
        failed += !c.passed as usize;
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
