use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn rokhlin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rokhlin")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn uhf_preset_passes() {
    let out = rokhlin(&["report", "--preset", "uhf"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["scenario"], "uhf_z2");
}

#[test]
fn e5328_report_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = rokhlin(&["report", "--preset", "e5328", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(x, y);
    let doc: Value = serde_json::from_slice(&x).unwrap();
    let names: Vec<&str> = doc["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"hypothesis_4_nondegenerate"));
    assert!(names.iter().any(|n| n.starts_with("certificate.")));
}

#[test]
fn failed_check_exits_one_and_is_named() {
    let out = rokhlin(&["certify-uhf", "--factors", "2", "--level", "3", "--delta1", "1/1000"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    let failed: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"precondition"));
}

#[test]
fn malformed_scenario_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"kind\": \"uhf_z2\", \"params\": ").unwrap();
    let out = rokhlin(&["report", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&path, r#"{"kind": "uhf_z2", "params": {"n_factors": 2}}"#).unwrap();
    assert_eq!(rokhlin(&["report", "--scenario", path.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&path, r#"{"kind": "nonsense", "params": {}}"#).unwrap();
    assert_eq!(rokhlin(&["report", "--scenario", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(rokhlin(&["report", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(rokhlin(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(rokhlin(&["certify-uhf", "--factors", "0"]).status.code(), Some(2));
}

#[test]
fn scenario_file_with_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    let out_path = dir.path().join("out.json");
    let text = serde_json::json!({
        "kind": "density",
        "params": {"eps": 0.2, "N": 2, "samples": 8},
        "out": out_path.to_str().unwrap(),
    });
    fs::write(&scenario, text.to_string()).unwrap();
    let out = rokhlin(&["report", "--scenario", scenario.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["data"]["dense"], true);
    assert_eq!(doc["params"]["seed"], 7);
}

#[test]
fn mao_sweep_column_equals_n() {
    let out = rokhlin(&["sweep", "--grid", "mao"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for (row, n) in rows.iter().zip(2..) {
        assert_eq!(row["point"]["N"], n);
        assert_eq!(row["data"]["mao"], n.to_string());
    }
}

#[test]
fn injectivity_sweep_has_one_row_per_case() {
    let out = rokhlin(&["sweep", "--grid", "injectivity"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1875);
    assert!(rows.iter().all(|r| r["data"]["injective"] == r["data"]["criterion"]));
}

#[test]
fn file_sweep_keeps_going_after_row_errors() {
    let dir = tempfile::tempdir().unwrap();
    let template = dir.path().join("t.json");
    let grid = dir.path().join("g.json");
    fs::write(&template, r#"{"kind":"uhf_z2","params":{"L":4,"delta1":"1/2","delta2":"1/2"}}"#).unwrap();
    fs::write(&grid, r#"{"n_factors":[0,1,2]}"#).unwrap();
    let out = rokhlin(&["sweep", "--template", template.to_str().unwrap(), "--grid-file", grid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["error"].is_string());
    assert_eq!(rows[2]["pass"], true);
}

#[test]
fn single_purpose_commands() {
    let fp = rokhlin(&["fixed-point", "--k", "2"]);
    assert_eq!(fp.status.code(), Some(0));
    assert_eq!(json(&fp)["data"]["multiplicities"][0][0], "14");

    let km = rokhlin(&["kmodule", "--module", r#"{"summands":[{"cyclic":2},{"free":true}]}"#, "--level", "3"]);
    assert_eq!(km.status.code(), Some(0));
    assert_eq!(json(&km)["data"]["k1"], 0);

    let mao = rokhlin(&["mao", "--n-cyc", "4"]);
    assert_eq!(json(&mao)["mao"], "4");

    let comm = rokhlin(&["commutant", "--l", "1,1,1,1", "--next", "1,3,1,3"]);
    assert_eq!(comm.status.code(), Some(0), "{}", String::from_utf8_lossy(&comm.stderr));

    let dens = rokhlin(&["density", "--eps", "0.5", "--theta", "0.41421356"]);
    assert_eq!(dens.status.code(), Some(0));
    assert!(json(&dens)["data"]["n"].as_u64().unwrap() <= 5);

    let at = rokhlin(&["certify-at", "--stages", "6"]);
    assert_eq!(at.status.code(), Some(0));
}
