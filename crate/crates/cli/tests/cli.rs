use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mrd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrd")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

const EX1: [&str; 11] = ["construct", "--q", "3", "--m", "4", "--modulus", "2,0,0,2,1", "--kind", "4", "--gamma", "2"];

fn write_ex1(dir: &Path) -> String {
    let out = mrd(&EX1);
    assert!(out.status.success());
    let path = dir.join("ex1.json");
    std::fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_all_agrees_on_ex1() {
    let dir = tempfile::tempdir().unwrap();
    let code = write_ex1(dir.path());
    let v = json_of(&mrd(&["check", "--code", &code, "--method", "all"]));
    assert_eq!(v["agree"], true);
    let verdicts = v["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 3);
    assert!(verdicts.iter().all(|x| x["is_mrd"] == true));
}

#[test]
fn constructed_code_round_trips_through_every_command() {
    let dir = tempfile::tempdir().unwrap();
    let code = write_ex1(dir.path());
    let g = json_of(&mrd(&["gabidulin", "--code", &code]));
    assert_eq!(g["gabidulin"]["is_generalized_gabidulin"], false);
    let d = json_of(&mrd(&["distance", "--code", &code]));
    assert_eq!(d["min_rank_distance"], 3);
    let dual = json_of(&mrd(&["dual", "--code", &code]));
    assert_eq!(dual["k"], 2);
    let iso = json_of(&mrd(&["isometry", "--code", &code, "--seed", "9"]));
    assert!(iso["isometry"]["A"].is_array());
    let image = serde_json::to_string(&iso["code"]).unwrap();
    let again = json_of(&mrd(&["check", "--code", &image, "--method", "minor"]));
    assert_eq!(again["verdicts"][0]["is_mrd"], true);
}

#[test]
fn gabidulin_construction_is_detected() {
    let out = mrd(&["construct", "--q", "2", "--m", "4", "--kind", "gabidulin", "--n", "4", "--k", "2", "--s", "3"]);
    let code = serde_json::to_string(&json_of(&out)).unwrap();
    let g = json_of(&mrd(&["gabidulin", "--code", &code]));
    assert_eq!(g["gabidulin"]["is_generalized_gabidulin"], true);
    let gl = json_of(&mrd(&["check", "--code", &code, "--method", "full-gl"]));
    assert_eq!(gl["verdicts"][0]["method"], "full_gl");
    assert_eq!(gl["verdicts"][0]["is_mrd"], true);
}

#[test]
fn isometry_is_reproducible_from_seed() {
    let dir = tempfile::tempdir().unwrap();
    let code = write_ex1(dir.path());
    let a = mrd(&["isometry", "--code", &code, "--seed", "5"]);
    let b = mrd(&["isometry", "--code", &code, "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let iso = serde_json::to_string(&json_of(&a)["isometry"]).unwrap();
    let c = json_of(&mrd(&["isometry", "--code", &code, "--isometry", &iso]));
    assert_eq!(c["code"], json_of(&a)["code"]);
}

#[test]
fn exhaustive_q2_search_finds_no_non_gabidulin_code() {
    let v = json_of(&mrd(&["search", "--q", "2", "--m", "4", "--n", "4", "--k", "2", "--mode", "exhaustive"]));
    assert_eq!(v["counts"]["candidates_scanned"], 38416);
    assert_eq!(v["counts"]["mrd_non_gabidulin"], 0);
    assert_eq!(v["cell_count"], "38416");
}

#[test]
fn random_search_classifies_included_candidate() {
    let v = json_of(&mrd(&[
        "search",
        "--q",
        "3",
        "--m",
        "4",
        "--modulus",
        "2,0,0,2,1",
        "--n",
        "4",
        "--k",
        "2",
        "--mode",
        "random",
        "--seed",
        "42",
        "--samples",
        "50",
        "--shard",
        "1/3",
        "--include-candidate",
        "[[3,9],[9,6]]",
    ]));
    assert_eq!(v["included"][0]["classification"], "mrd_non_gabidulin");
    assert_eq!(v["counts"]["candidates_scanned"], 17);
    assert_eq!(v["mode"]["seed"], 42);
    assert_eq!(v["shard"]["total"], 3);
}

#[test]
fn examples_verify_exits_zero() {
    let v = json_of(&mrd(&["examples", "--verify"]));
    assert_eq!(v["all_match"], true);
    assert_eq!(v["examples"].as_array().unwrap().len(), 4);
}

#[test]
fn gamma_validation_report() {
    let base = ["construct", "--q", "3", "--m", "5", "--modulus", "1,1,2,0,0,1", "--kind", "4"];
    let ok = json_of(&mrd(&[&base[..], &["--gamma", "2", "--validate-only"]].concat()));
    assert_eq!(ok["passes"], true);
    let bad = json_of(&mrd(&[&base[..], &["--gamma", "1", "--validate-only"]].concat()));
    assert_eq!(bad["passes"], false);
    assert_eq!(bad["quadratic_residue"], true);
    let refused = mrd(&[&base[..], &["--gamma", "1"]].concat());
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_two() {
    let out = mrd(&["check", "--code", r#"{"field": {"q": 3, "m": 4, "modulus": [2,0,0,2,1]}, "n": 4}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`k`"));

    assert_eq!(mrd(&["check", "--code", "/nonexistent/code.json"]).status.code(), Some(2));

    let bad_field = r#"{"field": {"q": 4, "m": 2, "modulus": [1,1,1]}, "n": 2, "k": 1, "generator": [[1,0]]}"#;
    assert_eq!(mrd(&["check", "--code", bad_field]).status.code(), Some(2));

    let search = ["search", "--q", "2", "--m", "4", "--n", "4", "--k", "2"];
    assert_eq!(mrd(&[&search[..], &["--shard", "3/3"]].concat()).status.code(), Some(2));
    assert_eq!(mrd(&[&search[..], &["--mode", "random"]].concat()).status.code(), Some(2));
    assert_eq!(mrd(&["isometry", "--code", bad_field]).status.code(), Some(2));
}

#[test]
fn non_mrd_verdicts_still_exit_zero() {
    let code =
        r#"{"field": {"q": 2, "m": 4, "modulus": [1,1,0,0,1]}, "n": 4, "k": 2, "generator": [[1,0,2,2],[0,1,2,2]]}"#;
    let v = json_of(&mrd(&["check", "--code", code]));
    assert_eq!(v["verdicts"][0]["is_mrd"], false);
    let g = json_of(&mrd(&["gabidulin", "--code", code]));
    assert!(g["gabidulin"].is_null());
}

#[test]
fn text_format() {
    let out = mrd(&["field", "--q", "2", "--m", "4", "--format", "text"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("order 16"));
}
