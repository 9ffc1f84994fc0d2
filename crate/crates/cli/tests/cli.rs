use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn tcspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcspace"))
        .args(args)
        .env_remove("TCSPACE_MAX_POINTS")
        .output()
        .expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad stdout ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn error_code(o: &Output) -> String {
    let v: Value = serde_json::from_slice(&o.stderr).expect("error JSON on stderr");
    v["error"]["code"].as_str().unwrap().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generated(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let o = tcspace(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    write(dir, name, &String::from_utf8(o.stdout).unwrap())
}

#[test]
fn four_cycle_demo_prints_the_kernel_vector() {
    let o = tcspace(&["demo", "four_cycle_kernel"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["dp_seminorm"], "0");
    let k = &v["kernel_vector"]["values"];
    assert_eq!([&k["x1"], &k["x2"], &k["x3"], &k["x4"]], ["1", "-1", "1", "-1"]);
}

#[test]
fn tc_reports_value_plan_and_certificate() {
    let dir = TempDir::new().unwrap();
    let space = generated(&dir, "s.json", &["gen", "min-metric", "--h", "5/4,3/2,7/4"]);
    let f = write(&dir, "f.json", r#"{"values": {"1": "1", "2": "1", "3": "-2"}}"#);
    let o = tcspace(&["tc", "--space", s(&space), "--problem", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["value"], "11/4");
    assert_eq!(v["plan"]["moves"], serde_json::json!([["1", "3", "1"], ["2", "3", "1"]]));
    assert!(v["certificate"]["potential"].is_object());

    // output is byte-stable
    let again = tcspace(&["tc", "--space", s(&space), "--problem", s(&f)]);
    assert_eq!(o.stdout, again.stdout);

    // and the emitted plan verifies against the emitted certificate
    let plan = write(&dir, "p.json", &v["plan"].to_string());
    let cert = write(&dir, "c.json", &v["certificate"].to_string());
    let o = tcspace(&["tc", "--space", s(&space), "--problem", s(&f), "--plan", s(&plan), "--certificate", s(&cert)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["verified"], true);
}

#[test]
fn min_condition_on_the_equilateral_triple() {
    let dir = TempDir::new().unwrap();
    let space = generated(&dir, "eq3.json", &["gen", "equilateral", "--n", "3"]);
    let o = tcspace(&["min-condition", "--space", s(&space)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["holds"], false);
    assert!(v["violation"].is_object());
    assert_eq!(v["witness"]["value_k"], "3");
    assert_eq!(v["witness"]["value_k_tilde"], "2");
    assert_eq!(v["witness"]["strict_gap"], true);
}

#[test]
fn validate_flags_non_metrics() {
    let dir = TempDir::new().unwrap();
    let good = generated(&dir, "c4.json", &["gen", "cycle", "--n", "4"]);
    assert_eq!(tcspace(&["validate", "--space", s(&good)]).status.code(), Some(0));
    let bad = write(&dir, "bad.json", r#"{"points":["a","b","c"],"dist":[["0","1","5"],["1","0","1"],["5","1","0"]]}"#);
    let o = tcspace(&["validate", "--space", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_out(&o);
    assert_eq!(v["ok"], false);
    assert_eq!(v["violations"][0]["kind"], "triangle");
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let c4 = generated(&dir, "c4.json", &["gen", "cycle", "--n", "4"]);
    let broken = write(&dir, "broken.json", "{");
    let o = tcspace(&["tc", "--space", s(&broken), "--values", "1,-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "malformed_input");

    let unknown = write(&dir, "u.json", r#"{"values": {"zz": "1"}}"#);
    let o = tcspace(&["tc", "--space", s(&c4), "--problem", s(&unknown)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "unknown_label");

    let o = tcspace(&["tc", "--space", s(&c4), "--values", "1,0,0,0"]);
    assert_eq!(error_code(&o), "not_zero_sum");

    let o = tcspace(&["demo", "no_such_demo"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "invalid_argument");
}

#[test]
fn point_limit_is_enforced() {
    let dir = TempDir::new().unwrap();
    let c4 = generated(&dir, "c4.json", &["gen", "cycle", "--n", "4"]);
    let o = Command::new(env!("CARGO_BIN_EXE_tcspace"))
        .args(["dp-kernel", "--space", s(&c4)])
        .env("TCSPACE_MAX_POINTS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "resource_limit");
}

#[test]
fn csv_output_is_flat() {
    let dir = TempDir::new().unwrap();
    let c4 = generated(&dir, "c4.json", &["gen", "cycle", "--n", "4"]);
    let o = tcspace(&["dp-kernel", "--space", s(&c4), "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "key,value");
    assert!(lines.contains(&"dimension,1"));
    assert!(lines.contains(&"basis.0.values.x2,-1"));
}

#[test]
fn tree_command_reports_closed_forms() {
    let dir = TempDir::new().unwrap();
    let tree = write(&dir, "t.json", r#"{"root":"r","edges":[["r","a","3/2"],["a","b","1"]]}"#);
    let o = tcspace(&["tree", "--tree", s(&tree), "--values", "0,1,-1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    // edge a-b carries one unit of product
    assert_eq!(v["tc"], "1");
    assert_eq!(v["coefficients"]["b"], "1");
    assert_eq!(v["coefficients"]["a"], "0");
    assert_eq!(v["dp_norm"], "1");
    assert_eq!(v["sandwich"]["holds"], true);

    let o = tcspace(&["tree", "--tree", s(&tree), "--root", "b"]);
    assert_eq!(json_out(&o)["tree"]["root"], "b");
}

#[test]
fn special_operations() {
    let o = tcspace(&["special", "median", "--h", "5/4,3/2,7/4", "--values", "1,1,-2"]);
    let v = json_out(&o);
    assert_eq!(v["m"], "2");
    assert_eq!(v["half_mass"], "2");

    let o = tcspace(&["special", "fast-tc", "--h", "5/4,3/2,7/4", "--values", "1,1,-2"]);
    assert_eq!(json_out(&o)["fast"], "11/4");

    let o = tcspace(&["special", "optimality", "--h", "5/4,3/2,7/4", "--values", "1,1,-2"]);
    assert_eq!(json_out(&o)["all_hold"], true);

    let h = "5/4,11/8,3/2,13/8,7/4,15/8";
    let o = tcspace(&["special", "subadditivity", "--h", h, "--x1", "1,-1,0,0,0,0", "--xp", "0,0,0,1,-1,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["gap"], "1/4");
    let o = tcspace(&["special", "subadditivity", "--h", h, "--x1", "1,-1,0,0,0,0", "--xp", "0,1,-1,0,0,0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = tcspace(&["special", "geodesic", "--n", "2", "--subset", "1,2", "--j", "1"]);
    assert_eq!(json_out(&o)["holds"], true);

    let o = tcspace(&["special", "sign-test", "--representing", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["holds"], true);
}

#[test]
fn every_demo_passes() {
    let o = tcspace(&["demo", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json_out(&o);
    let names: Vec<&str> = v["demos"].as_array().unwrap().iter().map(|d| d["demo"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(names.len(), 8);
}
