//! End-to-end tests of the command-line interface: document round trips,
//! check semantics, composition and comparison, audit determinism and exit
//! codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relators"))
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("relators-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is json")
}

const Z2: &str = r#"{"objects":1,
 "arrows":[{"id":0,"dom":0,"cod":0},{"id":1,"dom":0,"cod":0}],
 "compose":[[0,0,0],[0,1,1],[1,0,1],[1,1,0]],
 "identities":[0],
 "inverses":[0,1]}"#;

fn z4_to_z2_doc() -> String {
    let z4 = r#"{"objects":1,
 "arrows":[{"id":0,"dom":0,"cod":0},{"id":1,"dom":0,"cod":0},{"id":2,"dom":0,"cod":0},{"id":3,"dom":0,"cod":0}],
 "compose":[[0,0,0],[0,1,1],[0,2,2],[0,3,3],[1,0,1],[1,1,2],[1,2,3],[1,3,0],[2,0,2],[2,1,3],[2,2,0],[2,3,1],[3,0,3],[3,1,0],[3,2,1],[3,3,2]],
 "identities":[0],
 "inverses":[0,3,2,1]}"#;
    format!(r#"{{"source": {z4}, "target": {Z2}, "obj_map": [0], "arr_map": [0,1,0,1]}}"#)
}

fn biset_doc() -> String {
    format!(
        r#"{{"A": {Z2}, "B": {Z2},
 "fibers": {{"0,0": ["e","g"]}},
 "left": [[0,0,0],[0,1,1],[1,0,1],[1,1,0]],
 "right": [[0,0,0],[1,0,1],[0,1,1],[1,1,0]]}}"#
    )
}

#[test]
fn validate_accepts_a_groupoid_and_reports_its_kind() {
    let path = write_temp("z2.json", Z2);
    let output = bin().arg("validate").arg(&path).output().unwrap();
    assert!(output.status.success());
    let value = stdout_json(&output);
    assert_eq!(value["kind"], "groupoid");
    assert_eq!(value["summary"]["arrows"], 2);
}

#[test]
fn validate_rejects_broken_tables_with_exit_one() {
    // g∘g = g makes g non-invertible.
    let bad = r#"{"objects":1,
 "arrows":[{"id":0,"dom":0,"cod":0},{"id":1,"dom":0,"cod":0}],
 "compose":[[0,0,0],[0,1,1],[1,0,1],[1,1,1]],
 "identities":[0],
 "inverses":[0,1]}"#;
    let path = write_temp("bad.json", bad);
    let output = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let value = stdout_json(&output);
    assert_eq!(value["valid"], false);
}

#[test]
fn malformed_json_exits_two() {
    let path = write_temp("garbage.json", "{ not json");
    let output = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn check_final_and_dfib_semantics() {
    let path = write_temp("quot.json", &z4_to_z2_doc());
    let final_out = bin()
        .arg("check")
        .arg("--final")
        .arg(&path)
        .output()
        .unwrap();
    assert!(final_out.status.success());
    assert_eq!(stdout_json(&final_out)["holds"], true);

    let dfib_out = bin()
        .arg("check")
        .arg("--dfib")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(dfib_out.status.code(), Some(1));
    let value = stdout_json(&dfib_out);
    assert_eq!(value["holds"], false);
    assert!(value["witness"].as_str().unwrap().contains("lifts: 2"));

    let opfib_out = bin()
        .arg("check")
        .arg("--opfib")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(opfib_out.status.code(), Some(1));
}

#[test]
fn factorize_emits_a_factorization_with_provenance() {
    let path = write_temp("quot2.json", &z4_to_z2_doc());
    let output = bin().arg("factorize").arg(&path).output().unwrap();
    assert!(output.status.success());
    let value = stdout_json(&output);
    assert!(value["middle"]["objects"].as_u64().unwrap() >= 1);
    assert!(value["provenance"].as_array().unwrap().len() >= 1);
}

#[test]
fn compose_and_compare_distributors() {
    let path = write_temp("biset.json", &biset_doc());
    let composed = bin()
        .arg("compose")
        .arg("--dist")
        .arg(&path)
        .arg(&path)
        .output()
        .unwrap();
    assert!(composed.status.success());
    let value = stdout_json(&composed);
    assert_eq!(value["fibers"]["0,0"].as_array().unwrap().len(), 2);

    let compared = bin().arg("compare").arg(&path).arg(&path).output().unwrap();
    assert!(compared.status.success());
    let verdict = stdout_json(&compared);
    assert_eq!(verdict["bijective"], true);
    assert_eq!(verdict["action_compatible"], true);
    assert_eq!(verdict["route1_sizes"]["0,0"], 2);
}

#[test]
fn compose_spans_by_pullback() {
    // Identity span on Z2 composed with itself: the pullback apex pairs
    // arrows agreeing in the middle, giving Z2 again.
    let span = format!(
        r#"{{"apex": {Z2}, "A": {Z2}, "B": {Z2},
 "left": {{"obj_map": [0], "arr_map": [0,1]}},
 "right": {{"obj_map": [0], "arr_map": [0,1]}}}}"#
    );
    let path = write_temp("idspan.json", &span);
    let output = bin()
        .arg("compose")
        .arg("--span")
        .arg(&path)
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let value = stdout_json(&output);
    assert_eq!(value["apex"]["objects"], 1);
    assert_eq!(value["apex"]["arrows"].as_array().unwrap().len(), 2);
}

#[test]
fn reflect_emits_distributor_and_final_unit() {
    // The span Z2 <- Z2 -> Z2 with identity legs reflects onto the hom
    // distributor shape: its two-sided closure has singleton fibers.
    let span = format!(
        r#"{{"apex": {Z2}, "A": {Z2}, "B": {Z2},
 "left": {{"obj_map": [0], "arr_map": [0,1]}},
 "right": {{"obj_map": [0], "arr_map": [0,1]}}}}"#
    );
    let path = write_temp("span.json", &span);
    let output = bin().arg("reflect").arg(&path).output().unwrap();
    assert!(output.status.success());
    let value = stdout_json(&output);
    assert_eq!(value["unit_is_final"], true);
}

#[test]
fn audit_is_deterministic_and_reports_per_property() {
    let run = || {
        bin()
            .args([
                "audit",
                "--trials",
                "5",
                "--seed",
                "12345",
                "--max-objects",
                "3",
                "--property",
                "final_iff_full_eso",
                "--property",
                "theorem_main",
            ])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert!(first.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "reports must be byte-identical"
    );
    let value = stdout_json(&first);
    assert_eq!(value["all_passed"], true);
    assert_eq!(value["properties"].as_array().unwrap().len(), 2);
    assert_eq!(value["properties"][0]["passes"], 5);
    // Timing diagnostics go to stderr, not into the report.
    assert!(String::from_utf8_lossy(&first.stderr).contains("ms"));
    assert!(value["properties"][0].get("millis").is_none());
}

#[test]
fn audit_rejects_bad_config_with_exit_two() {
    let output = bin().args(["audit", "--trials", "0"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));

    let output = bin()
        .args(["audit", "--property", "no_such_property"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    let output = bin()
        .args(["audit", "--trials", "1", "--base", "gset:z9"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn audit_runs_on_a_gset_base() {
    let output = bin()
        .args([
            "audit",
            "--trials",
            "2",
            "--seed",
            "7",
            "--base",
            "gset:z3",
            "--property",
            "last_lemma",
            "--property",
            "alan_cc",
            "--property",
            "exactness",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert_eq!(stdout_json(&output)["all_passed"], true);
}
