use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn l2tors(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l2tors"))
        .current_dir(root())
        .env_remove("L2TORS_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 report")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn text_report_carries_header() {
    let o = l2tors(&["mahler", "--poly", "x-2"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert!(lines[0].starts_with("# l2tors "));
    assert_eq!(lines[1], "# command: mahler");
    let hash = lines[2].strip_prefix("# config-sha256: ").unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.bytes().all(|b| b.is_ascii_hexdigit()));
}

#[test]
fn csv_report_declares_schema() {
    let o = l2tors(&["mahler", "--poly", "x-2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    let body: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(s.contains("# csv-schema: mahler v1"));
    assert_eq!(body[0], "polynomial,value,method,grid,error_proxy");
    let value: f64 = body[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 2f64.ln()).abs() < 1e-9);
}

#[test]
fn json_report_parses_and_hash_matches_config() {
    let o = l2tors(&["combine", "--spec", "data/amalgam.ds", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["header"]["command"], "combine");
    assert_eq!(doc["result"]["value"]["exact"], "-3");
    let config = doc["header"]["config"].to_string();
    let digest = sha2_hex(config.as_bytes());
    assert_eq!(doc["header"]["config_sha256"], Value::String(digest));
}

fn sha2_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

#[test]
fn config_hash_depends_on_knobs_not_on_output_path() {
    let dir = std::env::temp_dir().join(format!("l2tors-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("report.txt");
    let a = l2tors(&["mahler", "--poly", "x-2", "-o", file.to_str().unwrap()]);
    assert_eq!(code(&a), 0);
    assert!(a.stdout.is_empty());
    let written = std::fs::read_to_string(&file).unwrap();
    let b = l2tors(&["mahler", "--poly", "x-2"]);
    assert_eq!(written, stdout(&b));
    let c = l2tors(&["mahler", "--poly", "x-2", "--grid", "16"]);
    let hash = |s: &str| s.lines().nth(2).unwrap().to_string();
    assert_ne!(hash(&written), hash(&stdout(&c)));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn broken_complex_fails_validation() {
    let o = l2tors(&["validate", "--complex", "data/broken.cx", "--tower", "data/z_pow2.tw"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("overall: FAIL"));
    // Engine commands refuse the same input before computing anything.
    let o = l2tors(&["torsion", "--complex", "data/broken.cx", "--tower", "data/z_pow2.tw"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn broken_tower_fails_validation() {
    let o = l2tors(&["validate", "--presentation", "data/z2.pres", "--tower", "data/z2_broken.tw"]);
    assert_eq!(code(&o), 2);
    let o = l2tors(&["validate", "--presentation", "data/z2.pres", "--tower", "data/z2_grid.tw"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn vanishing_determinant_is_a_numeric_failure() {
    let o = l2tors(&["torsion", "--complex", "data/doubled_edge.cx", "--abelian"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not det-L2-acyclic"));
}

#[test]
fn composition_is_refused() {
    let o = l2tors(&["combine", "--spec", "data/composition.ds"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("root"));
}

#[test]
fn missing_input_is_invalid() {
    let o = l2tors(&["combine", "--spec", "data/no_such_file.ds"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn thread_count_must_be_positive() {
    assert_eq!(code(&l2tors(&["--threads", "0", "mahler", "--poly", "x-2"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_l2tors"))
        .current_dir(root())
        .env("L2TORS_THREADS", "many")
        .args(["mahler", "--poly", "x-2"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn thread_count_does_not_change_reports() {
    let args = ["torsion", "--complex", "data/torus.cx", "--tower", "data/z2_small.tw"];
    let one = l2tors(&[&["--threads", "1"][..], &args[..]].concat());
    let two = l2tors(&[&["--threads", "2"][..], &args[..]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn abelian_torsion_of_a_minus_2_is_ln_2() {
    let o = l2tors(&["torsion", "--complex", "data/a_minus_2.cx", "--abelian", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rho = doc["result"]["value"].as_f64().expect("value in result");
    assert!((rho - 2f64.ln()).abs() < 1e-9, "rho = {rho}");
    assert_eq!(doc["result"]["degrees"][0]["weight"].to_string(), "0.0");
}

#[test]
fn growth_csv_has_one_row_per_level() {
    let o = l2tors(&["growth", "--complex", "data/a_minus_2.cx", "--tower", "data/z_growth.tw", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    let rows = s.lines().filter(|l| !l.starts_with('#')).count();
    // Column header plus at least one row for every level of the tower.
    assert!(rows >= 1 + 4, "{s}");
}
