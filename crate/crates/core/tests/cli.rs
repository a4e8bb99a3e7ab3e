//! Runs the `dkfis` binary as a user would.

use std::path::Path;
use std::process::{Command, Output};

fn dkfis(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dkfis")).args(args).current_dir(cwd).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn synth_train_predict_evaluate_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |o: Output| {
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        o
    };
    ok(dkfis(&["synth", "--n", "1500", "--seed", "2", "--out", "logs.csv"], d));
    ok(dkfis(&["train", "--data", "logs.csv", "--out", "model.json"], d));

    let pred = ok(dkfis(&["predict", "--bundle", "model.json", "--data", "logs.csv"], d));
    let text = String::from_utf8(pred.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.ends_with("svm_label,refined_label,raw_prediction,refined_prediction,fired_rule"));
    assert_eq!(lines.count(), 1500);

    let eval = ok(dkfis(&["evaluate", "--bundle", "model.json", "--data", "logs.csv", "--subset", "test", "--out", "eval.json"], d));
    let table = String::from_utf8(eval.stdout).unwrap();
    assert!(table.contains("G-metric means"));
    assert!(table.contains("Including Expert Knowledge"));

    let report = ok(dkfis(&["report", "--input", "eval.json", "--show-audit"], d));
    let rendered = String::from_utf8(report.stdout).unwrap();
    assert!(rendered.starts_with(&table));
}

#[test]
fn sweep_prints_one_row_per_width() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(dkfis(&["synth", "--n", "1200", "--seed", "3", "--out", "logs.csv"], d).status.code(), Some(0));
    let o = dkfis(&["sweep-rbf", "--data", "logs.csv", "--widths", "0.5,1,2"], d);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().filter(|l| l.trim_start().starts_with(|c: char| c.is_ascii_digit())).count() >= 3, "{text}");
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = dkfis(&["train", "--data"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = dkfis(&["no-such-command"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(dkfis(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn missing_input_exits_2_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = dkfis(&["train", "--data", "nowhere.csv", "--out", "m.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nowhere.csv"), "{}", stderr(&o));
}

#[test]
fn future_bundle_version_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(dkfis(&["synth", "--n", "1000", "--out", "logs.csv"], d).status.code(), Some(0));
    assert_eq!(dkfis(&["train", "--data", "logs.csv", "--out", "m.json"], d).status.code(), Some(0));
    let text = std::fs::read_to_string(d.join("m.json")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["version"] = serde_json::json!(2);
    std::fs::write(d.join("m.json"), value.to_string()).unwrap();
    let o = dkfis(&["predict", "--bundle", "m.json", "--data", "logs.csv"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("version 2"), "{}", stderr(&o));
}
