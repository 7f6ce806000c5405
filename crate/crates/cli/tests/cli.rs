use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn teamsem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teamsem")).args(args).env_remove("TEAMSEM_GRID").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
    model: PathBuf,
    team: PathBuf,
    empty: PathBuf,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"domain":["a","b","c"],"relations":{"P":{"arity":1,"tuples":[["a"],["b"]]}}}"#);
    let team = write(&dir, "t.json", r#"{"vars":["x","y"],"rows":[["a","a"],["a","b"],["c","a"]]}"#);
    let empty = write(&dir, "e.json", r#"{"vars":["x"],"rows":[]}"#);
    Fixture { dir, model, team, empty }
}

#[test]
fn parse_prints_structure_and_flags() {
    let o = teamsem(&["parse", "E y. (nondep(x;y) /\\ P(y))"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("exists y"));
    assert!(out.contains("free variables: x"));
    assert!(out.contains("first-order: false"));
}

#[test]
fn parse_errors_exit_2() {
    let o = teamsem(&["parse", "dep(x)"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dep"));
    assert_eq!(code(&teamsem(&["parse", "P(x"])), 2);
    assert_eq!(code(&teamsem(&["no-such-command"])), 2);
}

#[test]
fn parse_json_is_machine_readable() {
    let o = teamsem(&["parse", "--json", "NE \\/ P(x)"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["free_variables"], serde_json::json!(["x"]));
    assert_eq!(v["ast"]["or"][0]["atom"], "NE");
    assert_eq!(v["clean"], false);
}

#[test]
fn eval_sentence_and_empty_team() {
    let f = fixture();
    let o = teamsem(&["eval", "--model", s(&f.model), "--sentence", "E x. (P(x) /\\ NE)"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "true"));
    let o = teamsem(&["eval", "--model", s(&f.model), "--team", s(&f.empty), "NE"]);
    assert_eq!(stdout(&o).trim(), "false");
    let o = teamsem(&["eval", "--model", s(&f.model), "NE"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn eval_witness_and_stats() {
    let f = fixture();
    let o = teamsem(&["eval", "--model", s(&f.model), "--team", s(&f.team), "--witness", "--stats", "P(x) \\/ nondep(x;y)"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "true");
    assert!(out.contains("split"), "{out}");
    let stats: Value = serde_json::from_str(lines.last().unwrap()).unwrap();
    assert!(stats["nodes"].as_u64().unwrap() > 0);
}

#[test]
fn oracle_and_default_agree() {
    let f = fixture();
    for phi in ["E z. (intersect(x;z) /\\ P(z))", "A z. (z = x \\/ nonexcl(y;z))", "poss(x = y)"] {
        let a = teamsem(&["eval", "--model", s(&f.model), "--team", s(&f.team), phi]);
        let b = teamsem(&["eval", "--model", s(&f.model), "--team", s(&f.team), "--oracle", phi]);
        assert_eq!(stdout(&a), stdout(&b), "{phi}");
    }
}

#[test]
fn translate_matches_golden() {
    let o = teamsem(&["translate", "NE", "--vars", "x"]);
    assert_eq!(code(&o), 0);
    let golden = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/golden/01.txt")).unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn translate_rejects_inclusion() {
    let o = teamsem(&["translate", "incl(x;y)"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("incl") && err.contains("upwards closed"), "{err}");
}

#[test]
fn translate_verify_and_sidecar() {
    let f = fixture();
    let side = f.dir.path().join("side.json");
    let o = teamsem(&["translate", "inconst(x) \\/ P(x)", "--verify", "--grid", "2:3", "--sidecar", s(&side)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("_R(x)"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&side).unwrap()).unwrap();
    assert_eq!(v["tuple"], serde_json::json!(["x"]));
    assert!(v["stats"]["output_size"].as_u64().unwrap() > 0);
    let j: Value = serde_json::from_str(&stdout(&teamsem(&["translate", "--json", "const(x)"]))).unwrap();
    assert_eq!(j["constants"].as_array().unwrap().len(), 1);
    assert!(j["stages"].as_array().unwrap().len() >= 3);
}

#[test]
fn check_closure_and_bound() {
    let o = teamsem(&["check", "closure", "total"]);
    assert_eq!(code(&o), 0);
    let o = teamsem(&["check", "bound", "total", "3"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(v["passed"], false);
    assert!(v["counterexample"]["relation"].is_array());
    assert_eq!(code(&teamsem(&["check", "closure", "dep"])), 1);
    assert_eq!(code(&teamsem(&["check", "closure", "dep", "--downwards"])), 0);
    assert_eq!(code(&teamsem(&["check", "bound", "nondep", "2"])), 0);
}

#[test]
fn check_equiv_reports_mismatches() {
    let o = teamsem(&["check", "equiv", "P(x) \\/ !P(x)", "T", "--grid", "2:3"]);
    assert_eq!(code(&o), 0);
    let o = teamsem(&["check", "equiv", "P(x)", "NE", "--grid", "2:2"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["mismatches"].as_u64().unwrap() > 0);
    let o = teamsem(&["check", "equiv", "P(x)", "P(x)", "--grid", "2:2", "--verbose"]);
    assert!(stdout(&o).lines().count() > 1);
}

/// A mismatch report carries everything needed to replay its grid point.
#[test]
fn mismatch_replays_with_eval() {
    let f = fixture();
    let o = teamsem(&["check", "equiv", "P(x)", "NE", "--grid", "2:2"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let m = &v["first_mismatch"];
    let model = write(&f.dir, "rm.json", &m["model"].to_string());
    let team = write(&f.dir, "rt.json", &m["team"].to_string());
    for (phi, side) in [("P(x)", "left"), ("NE", "right")] {
        let o = teamsem(&["eval", "--model", s(&model), "--team", s(&team), phi]);
        assert_eq!(stdout(&o).trim(), m[side].to_string());
    }
}

#[test]
fn check_theorem_runs_a_suite() {
    let o = teamsem(&["check", "theorem", "height", "--depth", "1", "--per-level", "20", "--grid", "2:3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["passed"], true);
    let o = teamsem(&["--jobs", "2", "check", "theorem", "macros", "--grid", "2:2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn jobs_do_not_change_output() {
    let args = ["check", "theorem", "locality", "--depth", "1", "--per-level", "15", "--grid", "2:3"];
    let one = teamsem(&[&["--jobs", "1"], &args[..]].concat());
    let four = teamsem(&[&["--jobs", "4"], &args[..]].concat());
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn atoms_list_and_register() {
    let o = teamsem(&["atoms", "list", "--json"]);
    assert_eq!(stdout(&o).lines().count(), 15);
    let f = fixture();
    let good = write(&f.dir, "two.json", r#"{"name":"two","arity":1,"definition":"E a. E b. (R(a) /\\ R(b) /\\ a != b)","upwards_closed":true,"bound":2}"#);
    let o = teamsem(&["atoms", "register", s(&good)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("\"two\""));
    let bad = write(&f.dir, "bad.json", r#"{"name":"lonely","arity":1,"definition":"E a. (R(a) /\\ A b. (R(b) -> b = a))","upwards_closed":true}"#);
    let o = teamsem(&["atoms", "register", s(&bad)]);
    assert!(code(&o) != 0);
    let bad = write(&f.dir, "bad2.json", r#"{"name":"lonely","arity":1,"definition":"A a. A b. (!R(a) \\/ !R(b) \\/ a = b)","upwards_closed":true}"#);
    let o = teamsem(&["atoms", "register", s(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("counterexample"));
    let o = teamsem(&["atoms", "register", "--unchecked", s(&bad)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"unchecked\":true"));
}

#[test]
fn custom_atoms_flow_into_translation() {
    let f = fixture();
    let two = write(&f.dir, "two.json", r#"{"name":"two","arity":1,"definition":"E a. E b. (R(a) /\\ R(b) /\\ a != b)","upwards_closed":true,"bound":2}"#);
    let o = teamsem(&["--atoms", s(&two), "translate", "two(x) /\\ P(x)", "--verify", "--grid", "2:3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = teamsem(&["--atoms", s(&two), "--unchecked", "translate", "two(x)"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unchecked"));
}

#[test]
fn analyze_reports_height_and_witness() {
    let f = fixture();
    let o = teamsem(&["analyze", "--model", s(&f.model), "--team", s(&f.team), "nondep(x;y)"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["height"], 2);
    assert_eq!(v["witness_size"], 2);
    let o = teamsem(&["analyze", "--model", s(&f.model), "--team", s(&f.team), "total(x)"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["height"].is_null());
    let o = teamsem(&["analyze", "--model", s(&f.model), "--team", s(&f.team), "--big", "5", "NE /\\ nondep(x;y)"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["bigness"]["min_instances"], 3);
}
