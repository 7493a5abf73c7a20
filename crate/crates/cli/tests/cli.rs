use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_planecode"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn build(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_writes_inc_files() {
    let dir = tempfile::tempdir().unwrap();
    let pg5 = build(dir.path(), "pg5.inc", &["pg2", "--q", "5"]);
    let text = std::fs::read_to_string(&pg5).unwrap();
    assert!(text.starts_with("planecode v1\npoints 31\nlines 31\n"));

    let free = build(dir.path(), "x6.inc", &["freeplane", "--n", "6"]);
    assert!(std::fs::read_to_string(free).unwrap().contains("points 33\n"));

    let hall = build(dir.path(), "hall9.inc", &["hall9"]);
    assert!(std::fs::read_to_string(hall).unwrap().contains("points 91\n"));

    let again = build(dir.path(), "pg5b.inc", &["pg2", "--q", "5"]);
    assert_eq!(std::fs::read(&pg5).unwrap(), std::fs::read(again).unwrap());
}

#[test]
fn code_stats_reports_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let pg5 = build(dir.path(), "pg5.inc", &["pg2", "--q", "5"]);
    let r = ok_json(&["code", "stats", s(&pg5), "--p", "5"]);
    assert_eq!(r["dim"], 16);
    assert_eq!(r["dual_dim"], 15);
    assert_eq!(r["hull_dim"], 15);
    assert_eq!(r["hull_equals_dual"], true);
}

#[test]
fn census_shards_merge_to_the_whole_table() {
    let dir = tempfile::tempdir().unwrap();
    let pg3 = build(dir.path(), "pg3.inc", &["pg2", "--q", "3"]);
    let whole = dir.path().join("whole.cwe");
    let out = run(&["code", "census", s(&pg3), "--p", "3", "--kind", "complete", "-o", s(&whole)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&whole).unwrap();
    let total: u64 = text
        .lines()
        .filter(|l| !l.starts_with("cwe"))
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 2187);

    let mut parts = Vec::new();
    for i in 0..4 {
        let path = dir.path().join(format!("s{i}.cwe"));
        let shard = format!("{i}/4");
        let out = run(&["code", "census", s(&pg3), "--p", "3", "--shard", &shard, "-o", s(&path)]);
        assert!(out.status.success());
        parts.push(path);
    }
    let merged = dir.path().join("merged.cwe");
    let mut args = vec!["code", "merge"];
    args.extend(parts.iter().map(|p| s(p)));
    args.extend(["-o", s(&merged)]);
    assert!(run(&args).status.success());
    assert_eq!(std::fs::read(&whole).unwrap(), std::fs::read(&merged).unwrap());
}

#[test]
fn census_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let pg2 = build(dir.path(), "pg2.inc", &["pg2", "--q", "2"]);
    let cache = dir.path().join("cache");
    let a = run(&["code", "census", s(&pg2), "--p", "2", "--kind", "hamming", "--cache-dir", s(&cache)]);
    assert!(a.status.success());
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let b = run(&["code", "census", s(&pg2), "--p", "2", "--kind", "hamming", "--cache-dir", s(&cache)]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.ends_with("0,1\n3,7\n4,7\n7,1\n"));
}

#[test]
fn p5_full_census_needs_override_and_shards() {
    let dir = tempfile::tempdir().unwrap();
    let pg5 = build(dir.path(), "pg5.inc", &["pg2", "--q", "5"]);
    let out = run(&["code", "census", s(&pg5), "--p", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["code", "census", s(&pg5), "--p", "5", "--allow-full"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn lowweight_on_the_dual_of_pg3() {
    let dir = tempfile::tempdir().unwrap();
    let pg3 = build(dir.path(), "pg3.inc", &["pg2", "--q", "3"]);
    let words = dir.path().join("w6.txt");
    let r = ok_json(&["code", "lowweight", s(&pg3), "--p", "3", "--wmax", "6", "--dual", "--words", s(&words)]);
    assert_eq!(r["status"], "PROVEN");
    assert_eq!(r["min_weight"], 6);
    assert_eq!(r["weights"][1]["weight"], 6);
    assert_eq!(r["weights"][1]["count"], "156");
    assert_eq!(std::fs::read_to_string(words).unwrap().lines().count(), 156);
}

#[test]
fn typecount_of_single_lines() {
    let dir = tempfile::tempdir().unwrap();
    let pg5 = build(dir.path(), "pg5.inc", &["pg2", "--q", "5"]);
    let r = ok_json(&["code", "typecount", s(&pg5), "--p", "5", "--type", "25,6,0,0,0"]);
    assert_eq!(r["count"], "31");
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let pg3 = build(dir.path(), "pg3.inc", &["pg2", "--q", "3"]);
    let pg5 = build(dir.path(), "pg5.inc", &["pg2", "--q", "5"]);

    let r = ok_json(&["verify", "pappus", "--plane", s(&pg3)]);
    assert_eq!(r["copies"], "52");
    assert_eq!(r["bound"], "52");

    let r = ok_json(&["verify", "lemma39", "--plane", s(&pg5), "--k", "2"]);
    assert_eq!(r["rows"][0]["reconstructed"], 930);

    let r = ok_json(&["verify", "minweights", "--plane", s(&pg5)]);
    assert_eq!(r["expected_weights"], serde_json::json!([6, 10, 11, 12]));

    let r = ok_json(&["verify", "theorem42", "--plane", s(&pg5), "--pattern", "two-full-lines"]);
    assert_eq!(r["total"], "465");

    assert!(run(&["verify", "lemma32"]).status.success());
    assert!(run(&["verify", "lemma38"]).status.success());
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let pg3 = build(dir.path(), "pg3.inc", &["pg2", "--q", "3"]);
    let a = run(&["--threads", "1", "code", "census", s(&pg3), "--p", "3"]);
    let b = run(&["--threads", "3", "code", "census", s(&pg3), "--p", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.inc");
    std::fs::write(&bad, "planecode v1\npoints 3\nlines 1\n2 1\n").unwrap();
    assert_eq!(run(&["code", "stats", s(&bad), "--p", "2"]).status.code(), Some(3));
    assert_eq!(run(&["code", "stats", "/nonexistent.inc", "--p", "2"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let pg2 = build(dir.path(), "pg2.inc", &["pg2", "--q", "2"]);
    let out = run(&["code", "lowweight", s(&pg2), "--p", "2", "--wmax", "7", "--volume-limit", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
