use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tusk"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn copy_brief(dir: &Path, name: &str, as_name: &str) {
    fs::copy(fixtures().join("briefs").join(name), dir.join(as_name)).unwrap();
}

#[test]
fn help_and_version_exit_zero_without_side_effects() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["--help"][..],
        &["--version"],
        &["extract", "--help"],
        &["eval", "--help"],
        &["export", "--help"],
        &["report", "--help"],
        &["lexicon-validate", "--help"],
    ] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &[]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run(dir.path(), &["extract", "--jobs", "x", "a.txt"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(dir.path(), &["extract", "missing-2021-01.txt"]).status.code(),
        Some(1)
    );
    let out = run(dir.path(), &["--heuristics", "nope.conf", "extract", "."]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nope.conf"));
}

#[test]
fn extract_single_brief() {
    let dir = TempDir::new().unwrap();
    copy_brief(dir.path(), "brief-2021-01.txt", "eagle-2021-01.txt");
    let out = run(dir.path(), &["extract", "eagle-2021-01.txt"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("eagle-2021-01.txt: 3 events"));
    assert!(dir.path().join("tusk.db").exists());
}

#[test]
fn partial_failure_exits_two_and_keeps_valid_reports() {
    let dir = TempDir::new().unwrap();
    let briefs = dir.path().join("briefs");
    fs::create_dir(&briefs).unwrap();
    copy_brief(&briefs, "brief-2021-01.txt", "eagle-2021-01.txt");
    copy_brief(&briefs, "brief-2021-02.txt", "notes.txt");
    let out = run(dir.path(), &["extract", "--jobs", "2", "briefs"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("notes.txt"));

    let csv = run(dir.path(), &["export"]);
    assert_eq!(csv.status.code(), Some(0));
    let text = stdout(&csv);
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(text.lines().skip(1).all(|l| l.starts_with("eagle-2021-01,")));
}

#[test]
fn empty_directory_is_success() {
    let dir = TempDir::new().unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    let out = run(dir.path(), &["extract", "empty"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 events from 0 reports"));
}

#[test]
fn extracting_twice_leaves_store_unchanged() {
    let dir = TempDir::new().unwrap();
    let briefs = fixtures().join("briefs");
    let briefs = briefs.to_str().unwrap();
    run(dir.path(), &["extract", briefs]);
    let first = stdout(&run(dir.path(), &["export"]));
    run(dir.path(), &["extract", briefs]);
    assert_eq!(stdout(&run(dir.path(), &["export"])), first);
}

#[test]
fn eval_gold_against_itself() {
    let dir = TempDir::new().unwrap();
    let gold = fixtures().join("gold.csv");
    let gold = gold.to_str().unwrap();
    let out = run(
        dir.path(),
        &["eval", "--gold", gold, "--predictions", gold, "--out", "eval.txt"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("fully=16 partial=0 unrelated=0 undetected=0 total_gold=16\n"));
    let report = fs::read_to_string(dir.path().join("eval.txt")).unwrap();
    assert!(report.contains("fully_correct: 16\n") && report.contains("detection_rate: 1.000000\n"));
}

#[test]
fn eval_against_store() {
    let dir = TempDir::new().unwrap();
    run(dir.path(), &["extract", fixtures().join("briefs").to_str().unwrap()]);
    let gold = fixtures().join("gold.csv");
    let out = run(dir.path(), &["eval", "--gold", gold.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("fully=16 "));
    assert!(dir.path().join("evaluation.txt").exists());
}

#[test]
fn malformed_gold_exits_one() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("gold.csv"), "report,year\nx,2021\n").unwrap();
    let out = run(dir.path(), &["eval", "--gold", "gold.csv", "--predictions", "gold.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("header"));
}

#[test]
fn export_then_import_round_trips() {
    let dir = TempDir::new().unwrap();
    run(dir.path(), &["extract", fixtures().join("briefs").to_str().unwrap()]);
    assert_eq!(
        run(dir.path(), &["export", "--out", "events.csv"]).status.code(),
        Some(0)
    );
    let exported = tusk::store::import_csv_path(&dir.path().join("events.csv")).unwrap();
    let stored = tusk::EventStore::open(&dir.path().join("tusk.db"))
        .unwrap()
        .events()
        .unwrap();
    assert_eq!(exported.len(), stored.len());
    let gold = tusk::store::import_csv_path(&fixtures().join("gold.csv")).unwrap();
    let report = tusk::eval::evaluate(&exported, &gold, Default::default());
    assert_eq!(report.fully_correct, 16);
}

#[test]
fn export_without_store_fails() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["export"]).status.code(), Some(1));
}

#[test]
fn report_on_empty_store() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["report", "--out", "site"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json = fs::read_to_string(dir.path().join("site/summary.json")).unwrap();
    assert!(json.contains("\"total_events\": 0"));
    let html = fs::read_to_string(dir.path().join("site/dashboard.html")).unwrap();
    assert!(html.contains("data-metric=\"total_events\" data-value=\"0\""));
}

#[test]
fn lexicon_validate_reports_counts_and_conflicts() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["lexicon-validate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("ANIMAL: ") && text.contains("COUNTRY: ") && text.contains("total: "));

    fs::write(dir.path().join("a.csv"), "surface,label,canonical\ntusk,PRODUCT\n").unwrap();
    fs::write(dir.path().join("b.csv"), "surface,label,canonical\nTusk,ANIMAL\n").unwrap();
    let out = run(dir.path(), &["lexicon-validate", "a.csv", "b.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("a.csv:2") && err.contains("b.csv:2"), "{err}");
}

#[test]
fn custom_lexicon_and_heuristics() {
    let dir = TempDir::new().unwrap();
    copy_brief(dir.path(), "brief-2021-01.txt", "eagle-2021-01.txt");
    fs::write(
        dir.path().join("animals.csv"),
        "surface,label,canonical\nleopard,ANIMAL\n",
    )
    .unwrap();
    fs::write(dir.path().join("h.conf"), "pairing_window=0\n").unwrap();
    let out = run(
        dir.path(),
        &[
            "--animals",
            "animals.csv",
            "--heuristics",
            "h.conf",
            "extract",
            "eagle-2021-01.txt",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&run(dir.path(), &["export"]));
    assert!(!csv.contains("elephant"));
    assert!(csv.contains(",leopard,,") && csv.contains(",,skin,"), "{csv}");
}
