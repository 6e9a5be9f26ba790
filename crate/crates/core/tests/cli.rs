use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use risnet::harness::{from_csv, from_json, CSV_HEADER};

fn risnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_risnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write config");
    path
}

const SMALL_R_SWEEP: &str = "\
seed = 3
iterations = 2
thr_ris_db = 5
ue_count = 15
uav_count = 10
sweep = ris_count
sweep_values = 1..8
methods = original, random, relax, greedy
";

#[test]
fn run_covers_every_ris_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.toml", SMALL_R_SWEEP);
    let out = risnet(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    let rows = from_csv(&text).unwrap();
    let mut sweeps: Vec<f64> = rows.iter().map(|r| r.sweep).collect();
    sweeps.dedup();
    assert_eq!(sweeps, (1..=8).map(f64::from).collect::<Vec<_>>());
    assert_eq!(rows.len(), 8 * 4);
    assert!(rows.iter().all(|r| r.iters == 2 && r.mean_l2 >= 0.0));
}

#[test]
fn run_twice_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.toml", SMALL_R_SWEEP);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = risnet(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn json_output_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.toml", SMALL_R_SWEEP);
    let csv = risnet(&["run", "--config", cfg.to_str().unwrap()]);
    let json = risnet(&["run", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let from_c = from_csv(&String::from_utf8(csv.stdout).unwrap()).unwrap();
    let from_j = from_json(&String::from_utf8(json.stdout).unwrap()).unwrap();
    assert_eq!(from_c.len(), from_j.len());
    for (c, j) in from_c.iter().zip(&from_j) {
        assert_eq!(c.method, j.method);
        assert!((c.mean_l2 - j.mean_l2).abs() <= 1e-12 * j.mean_l2.abs().max(1.0));
    }
}

#[test]
fn inspect_single_pair_is_candidate_free() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "one.toml", "seed = 1\nue_count = 1\nuav_count = 1\nris_count = 0\n");
    let edges = dir.path().join("g.txt");
    let cands = dir.path().join("c.csv");
    let trace = dir.path().join("t.jsonl");
    let out = risnet(&[
        "inspect",
        "--config",
        cfg.to_str().unwrap(),
        "--graph",
        edges.to_str().unwrap(),
        "--candidates",
        cands.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("nodes 2 (UE 1, UAV 1), RIS 0"), "{text}");
    assert!(text.contains("candidates 0"));
    assert!(text.contains("candidate-free instance"));
    assert_eq!(std::fs::read_to_string(cands).unwrap().lines().count(), 1);
    assert_eq!(std::fs::read_to_string(trace).unwrap(), "");
    assert!(edges.exists());
}

#[test]
fn inspect_writes_trace_for_a_busy_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "busy.toml", "seed = 4\nthr_ris_db = 5\n");
    let trace = dir.path().join("t.jsonl");
    let out = risnet(&["inspect", "--config", cfg.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!lines.is_empty() && lines.len() <= 3);
    let mut last = 0.0;
    for (k, l) in lines.iter().enumerate() {
        assert_eq!(l["method"], "greedy");
        assert_eq!(l["step"], k + 1);
        assert!(l["predicted"].as_f64().unwrap() >= 0.0);
        let realized = l["realized"].as_f64().unwrap();
        assert!(realized >= last - 1e-12);
        last = realized;
    }
}

#[test]
fn verify_passes() {
    let out = risnet(&["verify"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 6);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "ue_count = -3\n");
    let out = risnet(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let cfg = write_config(dir.path(), "unknown.toml", "zeta = 1\nalpha_beta = 2\n");
    let out = risnet(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("alpha_beta") && err.contains("zeta"), "{err}");
    let out = risnet(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.toml", "iterations = 1\nue_count = 3\nuav_count = 2\n");
    let out_path = dir.path().join("no/such/dir/out.csv");
    let out = risnet(&["run", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("out.csv"));
}

#[test]
fn shipped_profiles_parse() {
    let figs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../figs");
    let mut seen = 0;
    for sub in [figs.clone(), figs.join("full")] {
        for entry in std::fs::read_dir(&sub).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "toml") {
                let plan = risnet::config::load_config_file(&path).unwrap();
                let want = if sub == figs { 50 } else { 500 };
                assert_eq!(plan.iterations, want, "{}", path.display());
                seen += 1;
            }
        }
    }
    assert_eq!(seen, 12);
}
