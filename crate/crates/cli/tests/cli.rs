use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use pairpref::sat::generate_22e3;
use pairpref::{generate_instance, serialize_instance, GeneratorParams, OrderClass};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn pairpref(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairpref")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", stdout(o)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn classify_cyclic_woman() {
    let o = pairpref(&["classify", path_str(&data("cyclic_woman.json"))]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["men"], "Strict");
    assert_eq!(v["women"], "Asymmetric");
    assert_eq!(v["agents"]["women"]["w"], "Asymmetric");
    assert_eq!(v["agents"]["men"]["u2"], "Strict");
}

#[test]
fn classify_empty_prefs_is_ties() {
    let v = json(&pairpref(&["classify", path_str(&data("empty_prefs.json"))]));
    assert_eq!((v["men"].as_str(), v["women"].as_str()), (Some("Ties"), Some("Ties")));
}

#[test]
fn malformed_input_exits_2() {
    let o = pairpref(&["classify", path_str(&data("malformed.json"))]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    let o = pairpref(&["classify", "/nonexistent/instance.json"]);
    assert_eq!(code(&o), 2);
    let o = pairpref(&["solve", "--notion", "medium", path_str(&data("cyclic_woman.json"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_strong_cyclic_woman_is_none() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let o = pairpref(&["solve", "--notion", "strong", path_str(&data("cyclic_woman.json")), "--trace", path_str(&trace)]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "NONE");
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(!lines.is_empty());
    for line in lines.lines() {
        let event: Value = serde_json::from_str(line).unwrap();
        assert!(event["event"].is_string());
    }
}

#[test]
fn hard_cells_exit_2_and_suggest_the_oracle() {
    // weak with a cyclic side
    let o = pairpref(&["solve", "--notion", "weak", path_str(&data("cyclic_woman.json"))]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("NP-complete") && err.contains("oracle"), "{err}");
    assert!(err.contains("Strict x Asymmetric"), "{err}");

    // super with acyclic x acyclic
    let dir = TempDir::new().unwrap();
    let p = GeneratorParams::new(6, 6, 1.0, 3).classes(OrderClass::Acyclic, OrderClass::Acyclic);
    let inst = generate_instance(&p);
    assert_eq!(inst.classify_sides(), (OrderClass::Acyclic, OrderClass::Acyclic));
    let file = write(&dir, "acyclic.json", &serialize_instance(&inst));
    let o = pairpref(&["solve", "--notion", "super", path_str(&file)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("super stability with Acyclic x Acyclic"));
    assert!(o.stdout.is_empty());
}

#[test]
fn check_reports_blocking_edge() {
    let o = pairpref(&[
        "check",
        "--notion",
        "weak",
        path_str(&data("cyclic_woman.json")),
        "--matching",
        path_str(&data("cyclic_woman_u1.json")),
    ]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["edge"], serde_json::json!(["u3", "w"]));
    assert_eq!(v["woman_side"], "<");
}

#[test]
fn check_single_edge_is_stable() {
    for notion in ["weak", "strong", "super"] {
        let o = pairpref(&[
            "check",
            "--notion",
            notion,
            path_str(&data("single_edge.json")),
            "--matching",
            path_str(&data("single_edge_match.json")),
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o).trim(), "STABLE");
    }
}

#[test]
fn check_rejects_malformed_matchings() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "path.json",
        r#"{"men":["a","b"],"women":["x","y"],"edges":[["a","x"],["b","x"],["b","y"]],"prefs":{}}"#,
    );
    let non_edge = write(&dir, "m.json", r#"{"pairs":[["a","y"]]}"#);
    let o = pairpref(&["check", "--notion", "weak", path_str(&inst), "--matching", path_str(&non_edge)]);
    assert_eq!(code(&o), 2);
    let o = pairpref(&[
        "check",
        "--notion",
        "weak",
        path_str(&data("empty_prefs.json")),
        "--matching",
        path_str(&data("duplicate_vertex.json")),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn oracle_verdicts_and_limits() {
    let ex = path_str(&data("cyclic_woman.json")).to_string();
    for notion in ["weak", "strong", "super"] {
        let o = pairpref(&["oracle", "--notion", notion, &ex]);
        assert_eq!(code(&o), 1);
        let v = json(&o);
        assert_eq!(v["verdict"], "not_exists");
        assert_eq!(v["matchings"], serde_json::json!([]));
    }
    let o = pairpref(&["oracle", "--notion", "weak", path_str(&data("empty_prefs.json")), "--jobs", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    // all incomparable: exactly the two perfect matchings
    assert_eq!(v["count"], 2);
    let o = pairpref(&["oracle", "--notion", "weak", &ex, "--max-edges", "2"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["verdict"], "limit");
}

#[test]
fn generate_is_deterministic() {
    let args = [
        "generate",
        "--men",
        "5",
        "--women",
        "4",
        "--density",
        "0.6",
        "--men-class",
        "ties",
        "--women-class",
        "asymmetric",
        "--seed",
        "11",
    ];
    let (a, b) = (pairpref(&args), pairpref(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["men"].as_array().unwrap().len(), 5);

    let dir = TempDir::new().unwrap();
    let file = write(&dir, "g.json", &stdout(&a));
    let c = json(&pairpref(&["classify", path_str(&file)]));
    assert!(c["men"] == "Strict" || c["men"] == "Ties");

    let o = pairpref(&["generate", "--men", "3", "--women", "3", "--density", "1.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reduce_writes_instance_and_provenance() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", &generate_22e3(3, 1).unwrap().to_dimacs());
    let prov = dir.path().join("prov.json");
    for notion in ["weak", "super"] {
        let o = pairpref(&["reduce", "--notion", notion, path_str(&cnf), "--provenance", path_str(&prov)]);
        assert_eq!(code(&o), 0);
        let v = json(&o);
        assert_eq!(v["men"].as_array().unwrap().len(), 18);
        assert_eq!(v["edges"].as_array().unwrap().len(), 60);
        let p: Value = serde_json::from_str(&std::fs::read_to_string(&prov).unwrap()).unwrap();
        assert_eq!(p["variables"][0]["t"], "t1");
        assert_eq!(p["clauses"].as_array().unwrap().len(), 4);
        assert_eq!(p["occurrences"].as_array().unwrap().len(), 12);
    }
    let o = pairpref(&["reduce", "--notion", "strong", path_str(&cnf)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_reduction_small_formula_agrees() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", &generate_22e3(3, 5).unwrap().to_dimacs());
    for notion in ["weak", "super"] {
        let o = pairpref(&["verify-reduction", "--notion", notion, path_str(&cnf)]);
        assert_eq!(code(&o), 0);
        let v = json(&o);
        assert_eq!(v["sat"], true);
        assert_eq!(v["stable_exists"], true);
        assert_eq!(v["agree"], true);
        assert_eq!(v["forward_sound"], true);
        assert_eq!(v["backward_sound"], true);
    }
}

#[test]
fn verify_reduction_large_formula_hits_limit() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", &generate_22e3(30, 2).unwrap().to_dimacs());
    let o = pairpref(&["verify-reduction", "--notion", "weak", path_str(&cnf)]);
    assert_eq!(code(&o), 3);
    let v = json(&o);
    assert_eq!(v["stable_exists"], "limit");
    assert_eq!(v["agree"], "unknown");
    assert_eq!(v["forward_sound"], true);
}

#[test]
fn verify_reduction_rejects_invalid_formulas() {
    let dir = TempDir::new().unwrap();
    // variable 1 occurs three times positively
    let cnf = write(&dir, "bad.cnf", "p cnf 3 4\n1 2 3 0\n1 -2 -3 0\n1 2 -3 0\n-1 -2 3 0\n");
    let o = pairpref(&["verify-reduction", "--notion", "weak", path_str(&cnf)]);
    assert_eq!(code(&o), 2);
    let garbage = write(&dir, "garbage.cnf", "p cnf x\n");
    assert_eq!(code(&pairpref(&["verify-reduction", "--notion", "super", path_str(&garbage)])), 2);
}

/// `solve` never prints a matching that `check` rejects.
#[test]
fn solve_then_check_fuzz() {
    let dir = TempDir::new().unwrap();
    let cells = [
        ("weak", OrderClass::Acyclic, OrderClass::Acyclic),
        ("strong", OrderClass::Ties, OrderClass::Asymmetric),
        ("strong", OrderClass::Asymmetric, OrderClass::Ties),
        ("super", OrderClass::Poset, OrderClass::Asymmetric),
        ("super", OrderClass::Asymmetric, OrderClass::Poset),
    ];
    let mut found = 0;
    for seed in 0..1000u64 {
        let (notion, men, women) = cells[seed as usize % cells.len()];
        let n = 2 + seed as usize % 6;
        let p = GeneratorParams::new(n, 2 + (seed as usize / 7) % 6, 0.7, seed).classes(men, women);
        let inst = write(&dir, "i.json", &serialize_instance(&generate_instance(&p)));
        let o = pairpref(&["solve", "--notion", notion, path_str(&inst)]);
        match code(&o) {
            0 => {
                found += 1;
                let m = write(&dir, "m.json", &stdout(&o));
                let c = pairpref(&["check", "--notion", notion, path_str(&inst), "--matching", path_str(&m)]);
                assert_eq!(code(&c), 0, "seed {seed}: {}", stdout(&c));
            }
            1 => assert_ne!(notion, "weak", "seed {seed}"),
            c => panic!("seed {seed}: exit {c}: {}", String::from_utf8_lossy(&o.stderr)),
        }
    }
    // every weak cell yields a matching
    assert!(found >= 200, "{found}");
}
