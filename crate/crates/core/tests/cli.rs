use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tardybatch::io::{load_instance, load_solution, read_json, GoldenFile, ReportFile};
use tardybatch::milp::parse_lp_summary;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tardybatch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["generate", "-n", "100", "--gamma", "0.33", "--seed", "9", "-o", s(p)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(load_instance(&a).unwrap().len(), 100);
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.contains("\"gen\"") && text.contains("chacha8"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["generate", "-n", "0"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let report = dir.path().join("report.json");
    let log = dir.path().join("log.csv");
    let inst = data("greedy_example.json");
    let out = run(&[
        "solve", s(&inst), "--rcl", "3", "--iters", "50", "--pr-iters", "50", "--seed", "2",
        "-o", s(&sol), "--report", s(&report), "--log", s(&log),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let solution = load_solution(&sol).unwrap();
    assert!(solution.tardy_count <= 5);
    assert!(solution.trace.is_some());
    let rep: ReportFile = read_json(&report, "report").unwrap();
    assert_eq!(rep.tardy_count, solution.tardy_count);
    assert!(std::fs::read_to_string(&log).unwrap().starts_with("iter,phase,best_tardy,elapsed_ms\n"));

    let out = run(&["verify", s(&inst), s(&sol), "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["feasible"], true);
    assert_eq!(v["optimum_tardy"], 5);
    assert_eq!(v["gap"], solution.tardy_count as u64 - 5);
}

#[test]
fn pure_greedy_is_deterministic_and_threads_agree() {
    let inst = data("moves_example.json");
    let a = run(&["solve", s(&inst), "--iters", "1", "--pr-iters", "0", "--rcl", "1", "--json"]);
    let b = run(&["solve", s(&inst), "--iters", "1", "--pr-iters", "0", "--rcl", "1", "--json", "--seed", "99"]);
    let ta: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let tb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(ta["tardy_jobs"], tb["tardy_jobs"]);

    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.json");
    assert!(run(&["generate", "-n", "40", "--seed", "4", "-o", s(&big)]).status.success());
    let one = run(&["solve", s(&big), "--iters", "30", "--pr-iters", "30", "--threads", "1", "--json"]);
    let four = run(&["solve", s(&big), "--iters", "30", "--pr-iters", "30", "--threads", "4", "--json"]);
    let one: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    let four: serde_json::Value = serde_json::from_slice(&four.stdout).unwrap();
    assert_eq!(one["tardy_count"], four["tardy_count"]);
    assert_eq!(one["tardy_jobs"], four["tardy_jobs"]);
}

#[test]
fn verify_accepts_the_classic_trace_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let inst = data("greedy_example.json");
    let good = dir.path().join("good.json");
    std::fs::write(
        &good,
        r#"{"batches": [[5,4,1],[3,2],[7,8],[9],[6]], "tardy_count": 6, "tardy_jobs": [2,3,6,7,8,9], "makespan": 166}"#,
    )
    .unwrap();
    let out = run(&["verify", s(&inst), s(&good)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("feasible, tardy=6"));

    let dup = dir.path().join("dup.json");
    std::fs::write(
        &dup,
        r#"{"batches": [[5,4,1],[3,2,1],[7,8],[9],[6]], "tardy_count": 6, "tardy_jobs": [], "makespan": 166}"#,
    )
    .unwrap();
    let out = run(&["verify", s(&inst), s(&dup)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("partition"));

    let bad_count = dir.path().join("bad_count.json");
    std::fs::write(
        &bad_count,
        r#"{"batches": [[5,4,1],[3,2],[7,8],[9],[6]], "tardy_count": 2, "tardy_jobs": [], "makespan": 166}"#,
    )
    .unwrap();
    assert_eq!(run(&["verify", s(&inst), s(&bad_count)]).status.code(), Some(2));
}

#[test]
fn invalid_instance_exits_two_with_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"capacity": 10, "jobs": [{"id": 1, "p": 0, "s": 11, "d": 3}]}"#).unwrap();
    let out = run(&["solve", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.lines().count() >= 3, "{err}");
}

#[test]
fn golden_files_still_hold() {
    for name in ["greedy_example", "moves_example"] {
        let inst = load_instance(&data(&format!("{name}.json"))).unwrap();
        let golden: GoldenFile = read_json(&data(&format!("{name}.golden.json")), "golden").unwrap();
        assert!(golden.matches(&inst), "{name}");
        let out = run(&["oracle", s(&data(&format!("{name}.json"))), "--check", s(&data(&format!("{name}.golden.json")))]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let moves: GoldenFile = read_json(&data("moves_example.golden.json"), "golden").unwrap();
    assert_eq!(moves.optimum_tardy, 3);
    let greedy: GoldenFile = read_json(&data("greedy_example.golden.json"), "golden").unwrap();
    assert_eq!(greedy.optimum_tardy, 5);
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.json");
    assert!(run(&["generate", "-n", "12", "-o", s(&big)]).status.success());
    assert_eq!(run(&["oracle", s(&big)]).status.code(), Some(2));
}

#[test]
fn export_milp_is_byte_stable_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.lp");
    let b = dir.path().join("b.lp");
    let inst = data("greedy_example.json");
    assert!(run(&["export-milp", s(&inst), "-o", s(&a)]).status.success());
    assert!(run(&["export-milp", s(&inst), "-o", s(&b)]).status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let summary = parse_lp_summary(&text).unwrap();
    // 4n + 2n^2 + n rows for n = 9
    assert_eq!(summary.rows, 4 * 9 + 2 * 81 + 9);
    assert_eq!(summary.binaries, 9 + 81);
}

#[test]
fn bench_writes_rep_and_aggregate_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "bench", "-n", "8", "--gammas", "0.5", "--reps", "3", "--iters", "5", "--pr-iters", "5",
        "-o", s(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 + 1);
    assert!(csv.lines().last().unwrap().starts_with("aggregate,"));
}
