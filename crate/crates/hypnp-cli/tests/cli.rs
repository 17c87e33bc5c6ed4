use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hypnp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypnp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn schema() -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema.json");
    let text = std::fs::read_to_string(path).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::options()
        .should_validate_formats(false)
        .compile(&value)
        .expect("schema compiles")
}

fn assert_valid(doc: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:?}\n{doc}");
}

#[test]
fn hodge_half_twist() {
    let out = hypnp(&["hodge", "--alpha", "0,1/2", "--beta", ""]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["theta"], serde_json::json!(["1/2", "1/2"]));
    assert_eq!(doc["polygon"]["slopes"], serde_json::json!(["1/2", "1/2"]));
    assert_valid(&doc);
}

#[test]
fn hodge_params_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let p = path.to_str().unwrap();
    let first = hypnp(&["hodge", "--alpha", "1/3,0,5/4", "--beta", "1/2", "--json", p]);
    assert_eq!(first.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["params"]["alpha"], serde_json::json!(["0", "1/4", "1/3"]));
    let second = hypnp(&["hodge", "--params-file", p]);
    assert_eq!(json(&second), written);
}

#[test]
fn hodge_orbit_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("h.svg");
    let out = hypnp(&["hodge", "--alpha", "0,1/8", "--p", "3", "--s", "2", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["orbit"]["polygon"]["slopes"], serde_json::json!(["1/4", "3/4"]));
    assert_eq!(doc["orbit"]["experimental"], Value::Bool(true));
    assert_valid(&doc);
    let text = std::fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("<polyline"));
}

#[test]
fn kloosterman_compare_all_points() {
    let out = hypnp(&["compare", "--p", "5", "--s", "1", "--aexp", "0,0", "--bexp", "", "--all-points"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 4);
    for r in reports {
        assert_eq!(r["verdict"], "ordinary");
        assert_eq!(r["newton_polygon"]["slopes"], serde_json::json!(["0", "1"]));
    }
    assert_eq!(doc["all_ordinary"], Value::Bool(true));
    assert_valid(&doc);
}

#[test]
fn compare_outputs_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("c.json");
    let svg = dir.path().join("c.svg");
    let csv = dir.path().join("c.csv");
    let out = hypnp(&[
        "compare", "--p", "5", "--aexp", "0,1,3", "--bexp", "2", "--point", "2",
        "--json", j.to_str().unwrap(), "--svg", svg.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
        "--expect-ordinary",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    assert_valid(&doc);
    let again = hypnp(&["compare", "--params-file", j.to_str().unwrap(), "--point", "2"]);
    assert_eq!(json(&again), doc);
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,s,n,m,aexps,bexps,point,verdict,np_slopes,hp_slopes"));
    assert_eq!(lines.next(), Some("5,1,3,1,0 1 3,2,2,ordinary,1 3/2 2,1 3/2 2"));
    assert!(std::fs::read_to_string(svg).unwrap().matches("<polyline").count() == 2);
}

#[test]
fn debug_padic_grids() {
    let out = hypnp(&["compare", "--p", "3", "--aexp", "0,1", "--point", "1", "--debug-padic"]);
    let doc = json(&out);
    assert!(doc["reports"][0]["traces"][0]["padic"]["pi_coeffs"].is_array());
    assert_valid(&doc);
    let plain = json(&hypnp(&["compare", "--p", "3", "--aexp", "0,1", "--point", "1"]));
    assert!(plain["reports"][0]["traces"][0].get("padic").is_none());
}

#[test]
fn expect_ordinary_mismatch_exits_3() {
    // orders dividing q - 1 but not p - 1: Newton lies strictly above Hodge
    let out = hypnp(&["compare", "--p", "3", "--s", "2", "--aexp", "0,2", "--all-points", "--expect-ordinary"]);
    assert_eq!(out.status.code(), Some(3));
    let doc = json(&out);
    assert_eq!(doc["reports"][0]["verdict"], "newton-above-hodge");
    let relaxed = hypnp(&["compare", "--p", "3", "--s", "2", "--aexp", "0,2", "--all-points"]);
    assert_eq!(relaxed.status.code(), Some(0));
}

#[test]
fn sum_kloosterman_group_ring() {
    let out = hypnp(&["sum", "--p", "5", "--aexp", "0,0", "--point", "1", "--ext", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    // 2 + zeta^2 + zeta^3
    assert_eq!(doc["group_ring"], serde_json::json!([[0, 0, 2], [2, 0, 1], [3, 0, 1]]));
    assert_eq!(doc["ord_q"], "0");
    assert_valid(&doc);
}

#[test]
fn polytope_document() {
    let out = hypnp(&["polytope", "--alpha", "0,1/3", "--beta", "1/2", "--wan-p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["d"], 6);
    assert_eq!(doc["basis"].as_array().unwrap().len(), 2);
    assert_eq!(doc["wan"]["holds"], Value::Bool(true));
    assert_valid(&doc);
    let shape = json(&hypnp(&["polytope", "--n", "2", "--m", "2", "--d", "1"]));
    assert_eq!(shape["volume"], "1/3");
}

#[test]
fn error_exit_codes() {
    assert_eq!(hypnp(&["sum", "--p", "5", "--aexp", "0,0", "--point", "0"]).status.code(), Some(1));
    assert_eq!(hypnp(&["hodge", "--alpha", "0", "--beta", "1/2,1/3"]).status.code(), Some(1));
    assert_eq!(hypnp(&["sum", "--p", "4", "--aexp", "0", "--point", "1"]).status.code(), Some(1));
    let budget = hypnp(&["sum", "--p", "7", "--aexp", "0,0,0", "--point", "1", "--ext", "2", "--budget", "10"]);
    assert_eq!(budget.status.code(), Some(2));
    let precision = hypnp(&["sum", "--p", "13", "--aexp", "0,0,0", "--point", "1", "--precision", "1000"]);
    assert_eq!(precision.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(hypnp(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(hypnp(&["compare", "--p", "5", "--aexp", "0"]).status.code(), Some(64));
    assert_eq!(hypnp(&["hodge"]).status.code(), Some(64));
    assert_eq!(hypnp(&["sum", "--p", "5", "--aexp", "x", "--point", "1"]).status.code(), Some(64));
    assert_eq!(hypnp(&["selftest", "--criterion", "99"]).status.code(), Some(64));
    assert_eq!(hypnp(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_is_deterministic() {
    let a = hypnp(&["sweep", "--p", "5", "--nmax", "2", "--mmax", "1", "--expect-ordinary"]);
    let b = hypnp(&["sweep", "--p", "5", "--nmax", "2", "--mmax", "1", "--threads", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["p", "s", "n", "m", "aexps", "bexps", "point", "verdict", "np_slopes", "hp_slopes"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(rows.iter().all(|r| &r[7] == "ordinary"));
    // n=1: 4 tuples, n=2 m=0: 10, n=2 m=1: 4*... each with 4 points
    assert_eq!(rows.len() % 4, 0);
}

#[test]
fn selftest_subset() {
    let out = hypnp(&["selftest", "--criterion", "3,6", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains("[PASS]")));
}
