use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_permea");

fn permea(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("PERMEA_THREADS", "2").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON: {e}\nstderr: {}", String::from_utf8_lossy(&o.stderr))
    })
}

fn validator() -> jsonschema::Validator {
    let schema: Value =
        serde_json::from_str(include_str!("../schema/report.schema.json")).expect("schema parses");
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(v: &Value) {
    let val = validator();
    let errors: Vec<String> = val.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema errors: {errors:#?}");
}

/// Re-serializing the parsed report gives the same bytes.
fn assert_round_trip(o: &Output) {
    let v = json(o);
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(again.as_bytes(), &o.stdout[..]);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn analyze_triangle() {
    let o = permea(&["analyze", "sierpinski-triangle"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid(&v);
    assert_round_trip(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["finite_type"]["status"]["state"], "stabilized");
    assert_eq!(v["finite_type"]["maps"], 18);
    assert_eq!(v["h"]["status"], "certified-finite");
    assert_eq!(v["h"]["points"].as_array().unwrap().len(), 3);
    assert_eq!(v["constants"]["delta"], "31/256");
    assert_eq!(v["constants"]["k"], 2);
    assert!(v.get("timing").is_none());
}

#[test]
fn analyze_carpet_warns_but_succeeds() {
    let o = permea(&["analyze", "sierpinski-carpet", "--cover-layers", "0"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid(&v);
    assert!(!v["warnings"].as_array().unwrap().is_empty());
    let suspected = v["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["verdict"]["verdict"] == "suspected-infinite")
        .count();
    assert!(suspected > 0);
    assert!(v["constants"].is_null());
}

#[test]
fn analyze_timing_is_opt_in() {
    let o = permea(&["analyze", "cantor-line", "--timing"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid(&v);
    assert!(v["timing"]["closure_ms"].is_u64());
}

#[test]
fn malformed_input_exits_1_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\"dim\": 2,\n \"maps\": [ }");
    let o = permea(&["analyze", &f]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn non_contractive_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "grow.json",
        r#"{"dim": 1, "maps": [{"ratio": 2, "translate": [0]}, {"ratio": "1/2", "translate": [1]}]}"#,
    );
    assert_eq!(code(&permea(&["analyze", &f])), 1);
}

#[test]
fn unknown_builtin_exits_1() {
    let o = permea(&["analyze", "no-such-set"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sierpinski-triangle"));
}

#[test]
fn overflow_exits_2_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "overflow.json",
        r#"{"dim": 1, "maps": [
            {"ratio": "1/2", "translate": [0]},
            {"ratio": "1/2", "translate": ["1/2"]},
            {"ratio": "1/2", "translate": [0.35355339059327373]}]}"#,
    );
    let o = permea(&["analyze", &f, "--max-maps", "200", "--pair-levels", "2..3", "--dim-levels", "1..4"]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["finite_type"]["status"]["state"], "overflow");
    assert!(v["h"].is_null());
}

#[test]
fn path_triangle_stays_within_delta() {
    let o = permea(&[
        "path", "sierpinski-triangle", "--from", "-0.2,0.3", "--to", "1.2,0.3", "--delta", "0.098", "--levels", "3..5",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_valid(&v);
    assert_round_trip(&o);
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    let ex: Vec<f64> = levels.iter().map(|l| l["excess"].as_f64().unwrap()).collect();
    assert!(ex.iter().all(|e| *e <= 0.098), "{ex:?}");
    assert!(ex[2] < ex[0], "{ex:?}");
    assert!(levels.iter().all(|l| l["method"] == "finite-type"));
}

#[test]
fn path_bmc_excess_is_bounded_below() {
    let o = permea(&["path", "bmc", "--from", "-0.05,1", "--to", "1.05,1", "--delta", "0.25", "--levels", "1", "--crossing", "0"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid(&v);
    let e = v["levels"][0]["excess"].as_f64().unwrap();
    assert!(e >= 0.5 * 9.2, "{e}");
}

#[test]
fn path_degenerate_endpoints() {
    let o = permea(&["path", "svc", "--from", "-0.5,-0.5", "--to", "-0.5,-0.5", "--delta", "0.1", "--levels", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["levels"][0]["length"], 0.0);
    assert_eq!(v["levels"][0]["excess"], 0.0);
}

#[test]
fn path_all_blocked_exits_3() {
    let o = permea(&["path", "bmc-full", "--from", "-0.05,1", "--to", "1.05,1", "--delta", "0.25", "--levels", "1"]);
    assert_eq!(code(&o), 3);
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["all_blocked"], true);
}

#[test]
fn path_rejects_bad_delta() {
    assert_eq!(code(&permea(&["path", "svc", "--from", "0,0", "--to", "1,1", "--delta", "-1"])), 1);
}

#[test]
fn path_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let o = permea(&[
        "path", "cantor", "--from", "-0.1,0.5", "--to", "1.1,0.5", "--delta", "0.1", "--levels", "2,3",
        "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    let cells = text.find("class=\"cells\"").unwrap();
    let path = text.find("class=\"path\"").unwrap();
    assert!(cells < path);
}

#[test]
fn carpet_builtin_pattern() {
    let o = permea(&["carpet", "--check-window", "--crossing-level", "1,2", "--measure-levels", "1..4"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["pattern"]["cells"], 216);
    assert_eq!(v["window"]["result"], "pass");
    assert_eq!(v["window"]["windows"], 228);
    assert_eq!(v["measures"][3]["measure"], "6561/160000");
    assert_eq!(v["crossing"][0]["variation"], "46/5");
}

#[test]
fn carpet_edge_patterns() {
    let full = json(&permea(&["carpet", "--pattern", "bmc-full", "--check-window", "--crossing-level", "1"]));
    assert_valid(&full);
    assert_eq!(full["window"]["result"], "pass");
    assert_eq!(full["crossing"][0]["result"], "blocked");
    let empty = json(&permea(&["carpet", "--pattern", "bmc-empty", "--check-window", "--crossing-level", "1"]));
    assert_valid(&empty);
    assert_eq!(empty["window"]["result"], "fail");
    assert_eq!(empty["crossing"][0]["variation"], "0/1");
}

#[test]
fn render_empty_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.json", r#"{"viewport": {"min": [0, 0], "max": [1, 1]}, "width": 64, "height": 64, "layers": []}"#);
    let out = dir.path().join("e.svg");
    assert_eq!(code(&permea(&["render", &spec, "--svg", out.to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("<?xml"));
    assert!(text.contains("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\""));
    assert!(text.trim_end().ends_with("</svg>"));
    assert!(!text.contains("<g"));
}

#[test]
fn render_rejects_points_outside_viewport() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.json",
        r#"{"viewport": {"min": [0, 0], "max": [1, 1]}, "width": 64, "height": 64,
            "layers": [{"kind": "path", "points": [[0, 0], [1.5, 0.5]]}]}"#,
    );
    let out = dir.path().join("e.svg");
    assert_eq!(code(&permea(&["render", &spec, "--svg", out.to_str().unwrap()])), 1);
    assert!(!out.exists());
}

#[test]
fn render_unwritable_output() {
    let o = permea(&["render", "scene:bmc", "--svg", "/nonexistent-dir/x.svg"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn triangle_loop_scene_puts_loop_above_cells() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    for p in [&a, &b] {
        assert_eq!(code(&permea(&["render", "scene:triangle-loop", "--svg", p.to_str().unwrap()])), 0);
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.find("class=\"cells\"").unwrap() < text.find("class=\"loop\"").unwrap());
}

#[test]
fn bad_thread_count_is_an_input_error() {
    let o = Command::new(BIN).args(["carpet"]).env("PERMEA_THREADS", "zero").output().unwrap();
    assert_eq!(code(&o), 1);
}
