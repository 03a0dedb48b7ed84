use std::path::Path;
use std::process::{Command, Output};

use blowdown::constructions::{self, DATA_DIR_ENV};
use serde_json::Value;

fn blowdown(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowdown")).args(args).env_remove(DATA_DIR_ENV).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json envelope")
}

#[test]
fn cpq_text_and_json() {
    let o = blowdown(&["cpq", "19", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "4 7 2 2 3 2 2\nlens order 361\n");
    let v = json(&blowdown(&["--json", "cpq", "131", "27"]));
    assert_eq!(v["command"], "cpq");
    assert_eq!(v["results"]["chain"], serde_json::json!([5, 7, 6, 2, 3, 2, 2, 2, 2, 3, 2, 2, 2]));
    assert_eq!(v["results"]["lens_order"], 17161);
    assert_eq!(v["summary"]["pass"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(blowdown(&["cpq", "6", "4"]).status.code(), Some(2));
    assert_eq!(blowdown(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(blowdown(&["verify", "no_such_construction"]).status.code(), Some(2));
    assert_eq!(blowdown(&["verify"]).status.code(), Some(2));
    for name in constructions::list_builtins() {
        let o = blowdown(&["verify", &name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn list_names_builtins() {
    let out = stdout(&blowdown(&["list"]));
    for name in ["main_k3", "pencil2_k3", "k4"] {
        assert!(out.contains(name), "{out}");
    }
}

#[test]
fn tchain_gen_counts() {
    let o = blowdown(&["tchain", "gen", "--max-len", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), tchains_up_to(3));
    assert!(rows[0].starts_with("4\t"), "{}", rows[0]);
}

fn tchains_up_to(k: usize) -> usize {
    blowdown::tchains::generate_class_t(k).len()
}

#[test]
fn json_reports_are_deterministic() {
    for args in [
        &["--json", "verify", "main_k3"][..],
        &["--json", "verify", "k4"],
        &["--json", "tchain", "gen", "--max-len", "6"],
    ] {
        let a = blowdown(args);
        let b = blowdown(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let v = json(&a);
        assert_eq!(v["inputs_digest"].as_str().map(str::len), Some(64));
    }
}

#[test]
fn verify_report_counts_match() {
    let v = json(&blowdown(&["--json", "verify", "main_k3"]));
    let checks = v["results"]["checks"].as_array().expect("checks");
    assert_eq!(v["summary"]["checks"].as_u64(), Some(checks.len() as u64));
    assert_eq!(v["summary"]["failed"], 0);
}

fn write_dataset(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, text).expect("write");
    path.display().to_string()
}

#[test]
fn dataset_file_and_data_dir_override() {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut c = constructions::load_builtin("k4").expect("k4");
    let path = write_dataset(dir.path(), "k4", &c.to_json());
    assert_eq!(blowdown(&["verify", "--dataset", &path]).status.code(), Some(0));

    c.chains[0].entries[0] += 1;
    write_dataset(dir.path(), "k4", &c.to_json());
    let o = blowdown(&["verify", "--dataset", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL chain:"), "{}", stdout(&o));

    let o = Command::new(env!("CARGO_BIN_EXE_blowdown"))
        .args(["verify", "k4"])
        .env(DATA_DIR_ENV, dir.path())
        .output()
        .expect("spawn");
    assert_eq!(o.status.code(), Some(1), "override directory should shadow the built-in");
}

#[test]
fn contract_and_invariants_on_files() {
    let dir = tempfile::tempdir().expect("tempdir");
    let c = constructions::load_builtin("main_k3").expect("main_k3");
    let path = write_dataset(dir.path(), "main_k3", &c.to_json());

    let v = json(&blowdown(&["--json", "invariants", &path]));
    assert_eq!(v["results"]["invariants"]["k_squared"], 3);
    assert_eq!(v["results"]["invariants"]["fingerprint"], "P2#6(-P2)");
    assert_eq!(v["results"]["rationality_excluded"], true);

    let o = blowdown(&["contract", &path, "--report", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["results"]["contraction"]["k_squared"], "3");

    let graph = c.graph.as_ref().expect("graph");
    let gpath = dir.path().join("graph.json");
    std::fs::write(&gpath, serde_json::to_string(graph).expect("graph json")).expect("write");
    let v = json(&blowdown(&["--json", "pi1", &gpath.display().to_string()]));
    assert_eq!(v["results"]["trivial"], true);
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let dir = tempfile::tempdir().expect("tempdir");
    let bad = write_dataset(dir.path(), "bad", "{ not json");
    assert_eq!(blowdown(&["verify", "--dataset", &bad]).status.code(), Some(2));
    assert_eq!(blowdown(&["pi1", &bad]).status.code(), Some(2));
    let missing = dir.path().join("missing.json").display().to_string();
    assert_eq!(blowdown(&["invariants", &missing]).status.code(), Some(2));
}
