use std::path::Path;
use std::process::{Command, Output};

fn dynplan(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynplan"))
        .env_remove("DYNPLAN_OUT_DIR")
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn play_writes_trace_and_frames() {
    let dir = tempfile::tempdir().unwrap();
    let o = dynplan(dir.path(), &["play", "--seed", "7", "--dump-frames", "--model", "velocity"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("outcome"));
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    let trace = names.iter().find(|n| n.ends_with(".jsonl")).expect("trace");
    let lines = std::fs::read_to_string(dir.path().join(trace)).unwrap();
    let frames = names.iter().filter(|n| n.ends_with(".ppm")).count();
    assert_eq!(frames, lines.lines().count() + 1);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = dynplan(
        dir.path(),
        &["bench", "--model", "oracle", "--model", "none", "--k", "1,3", "--speeds", "2x", "--episodes", "4"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("model,n_samples,speed,k,G,T,D,S_mean,S_std,episodes"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn render_writes_three_images() {
    let dir = tempfile::tempdir().unwrap();
    let play = dynplan(dir.path(), &["play", "--seed", "11", "--model", "oracle"]);
    assert!(play.status.success(), "{}", stderr(&play));
    let trace = dir.path().join(format!("trace_{:016x}.jsonl", 11));
    let o = dynplan(
        dir.path(),
        &[
            "render",
            "--seed",
            "11",
            "--trace",
            trace.to_str().unwrap(),
            "--step",
            "2",
            "--horizon",
            "5",
            "--model",
            "velocity",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("FN"));
    for suffix in ["truth", "velocity", "error"] {
        let p = dir.path().join(format!("render_{:016x}_t2_k5_{suffix}.ppm", 11));
        let bytes = std::fs::read(&p).unwrap();
        assert!(bytes.starts_with(b"P6\n48 48\n255\n"));
    }
}

#[test]
fn config_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "level = 6\nspeeed = 2x\n").unwrap();
    let o = dynplan(dir.path(), &["--config", cfg.to_str().unwrap(), "play"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = dynplan(dir.path(), &["play", "--temperature=0"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("temperature"));

    let o = dynplan(dir.path(), &["play", "--model", "pixelcnn"]);
    assert!(!o.status.success());
}

#[test]
fn strict_mode_warns_but_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = dynplan(dir.path(), &["play", "--strict-presets", "--rollout-length", "4", "--seed", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: rollout_length 4"));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dynplan"))
        .env("DYNPLAN_OUT_DIR", dir.path())
        .args(["play", "--seed", "3", "--model", "frozen"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join(format!("trace_{:016x}.jsonl", 3)).exists());
}

#[test]
fn validate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = dynplan(dir.path(), &["validate"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).matches("[PASS]").count(), 5);
}
