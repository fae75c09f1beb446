use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn mtgw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtgw")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn check_exit_codes() {
    let ok = mtgw(&["check", path(&data("two_label.json"))]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_json(&ok)["passed"], true);

    let bad = mtgw(&["check", path(&data("two_label_unbalanced.json"))]);
    assert_eq!(bad.status.code(), Some(1));
    let report = stdout_json(&bad);
    assert_eq!(report["failed"], "condition_ii");
    assert_eq!(report["condition_ii"]["product"], "3/4");

    let dir = tempfile::tempdir().unwrap();
    let truncated = dir.path().join("truncated.json");
    let text = std::fs::read_to_string(data("two_label.json")).unwrap();
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(mtgw(&["check", path(&truncated)]).status.code(), Some(2));
    assert_eq!(mtgw(&["check", "no/such/file.json"]).status.code(), Some(2));
}

#[test]
fn construct_writes_a_verified_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mu.json");
    let run = mtgw(&["construct", path(&data("two_label.json")), path(&out)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let mu: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(mu["root"][0]["p"], "3/8");
    assert_eq!(mu["root"][1]["p"], "5/8");
    assert_eq!(mu["verification"]["passed"], true);
    assert_eq!(mtgw(&["verify", path(&out)]).status.code(), Some(0));

    let refused = mtgw(&["construct", path(&data("two_label_unbalanced.json")), path(&dir.path().join("no.json"))]);
    assert_eq!(refused.status.code(), Some(1));
    assert!(!dir.path().join("no.json").exists());
}

#[test]
fn parametrize_at_one_half_matches_construct() {
    let dir = tempfile::tempdir().unwrap();
    let built = dir.path().join("built.json");
    let param = dir.path().join("param.json");
    assert_eq!(mtgw(&["construct", path(&data("two_label.json")), path(&built)]).status.code(), Some(0));
    let run = mtgw(&[
        "parametrize",
        path(&data("two_label_template.json")),
        path(&data("two_label_params.json")),
        path(&param),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(std::fs::read(&built).unwrap(), std::fs::read(&param).unwrap());
}

#[test]
fn plain_and_augmented_measures() {
    let plain = mtgw(&["construct", path(&data("three_label_plain.json")), "-"]);
    assert_eq!(plain.status.code(), Some(0));
    let mu = stdout_json(&plain);
    let root: Vec<&str> = mu["root"].as_array().unwrap().iter().map(|e| e["p"].as_str().unwrap()).collect();
    assert_eq!(root, ["3/7", "2/7", "2/7"]);

    let aug = mtgw(&["construct", path(&data("augmented_gw.json")), "-"]);
    let mu = stdout_json(&aug);
    let dist = &mu["neighbors"][0]["dist"];
    assert_eq!(dist[0]["c"], serde_json::json!([2]));
    assert_eq!(dist[1]["c"], serde_json::json!([3]));
    assert_eq!(dist[0]["p"], "1/2");
    assert_eq!(dist[1]["p"], "1/2");
}

#[test]
fn cover_of_a_star_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("star.json");
    let dot = dir.path().join("star.dot");
    let run = mtgw(&["cover", path(&data("star.adj")), path(&out), "--dot", path(&dot)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let mu: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(mu["root"][0]["p"], "1/2");
    assert_eq!(mu["root"][1]["p"], "1/2");
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    assert_eq!(mtgw(&["verify", path(&out)]).status.code(), Some(0));

    let small = mtgw(&["cover", path(&data("k23.adj")), "-", "--bound", "4"]);
    assert_eq!(small.status.code(), Some(2));
}

#[test]
fn simulate_agrees_with_exact_flows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mu.json");
    assert_eq!(mtgw(&["construct", path(&data("two_label.json")), path(&out)]).status.code(), Some(0));
    let run = mtgw(&[
        "--json", "simulate", path(&out), "--trials", "20000", "--seed", "7", "--from", "1:(1,1)", "--to", "2:(1,1)",
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stdout));
    let first = run.stdout.clone();
    let again = mtgw(&[
        "--json", "simulate", path(&out), "--trials", "20000", "--seed", "7", "--from", "1:(1,1)", "--to", "2:(1,1)",
    ]);
    assert_eq!(first, again.stdout);

    let mtp = mtgw(&["simulate", path(&out), "--trials", "20000", "--seed", "7", "--mtp", "1", "2"]);
    assert_eq!(mtp.status.code(), Some(0));

    let not_adjacent = mtgw(&["simulate", path(&out), "--trials", "10", "--seed", "1", "--from", "1:(2,0)", "--to", "2:(1,1)"]);
    assert_eq!(not_adjacent.status.code(), Some(2));
}

#[test]
fn verify_rejects_a_tampered_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mu.json");
    assert_eq!(mtgw(&["construct", path(&data("two_label.json")), path(&out)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let tampered = text.replacen("\"3/8\"", "\"1/2\"", 1).replacen("\"5/8\"", "\"1/2\"", 1);
    assert_ne!(text, tampered);
    std::fs::write(&out, tampered).unwrap();
    assert_eq!(mtgw(&["verify", path(&out)]).status.code(), Some(1));
}
