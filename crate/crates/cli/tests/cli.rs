use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2gen")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn valuation_of_expression() {
    let o = run(&["val", "--ring", "Z[s,t]", "--pi", "t", "--expr", "s*t^2 + t^3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2");
}

#[test]
fn mainstep_certificate_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    let o = run(&["witness", "mainstep", "--base", "Z", "--f", "1+s*t", "--p", "2", "--out", p]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let cert = sl2gen::expr::load_certificate(&text).unwrap();
    let amb = cert.ambient.clone();
    let want = sl2gen::expr::parse_matrix("[[1-2*(1-s)/t, 4/t],[-(1-s)^2/t, 1+2*(1-s)/t]]", &amb).unwrap();
    assert_eq!(cert.h, want);
    let o = run(&["verify", "--cert", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("TheoremBacked"));
}

#[test]
fn tampered_certificate_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    run(&["witness", "mainstep", "--base", "Z", "--f", "1+s*t", "--p", "2", "--out", p]);
    let text = std::fs::read_to_string(&path).unwrap().replace("4/t", "5/t");
    std::fs::write(&path, text).unwrap();
    let o = run(&["verify", "--cert", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL] det_h_is_one"));
}

#[test]
fn reduce_produces_verified_word() {
    let o = run(&["--json", "reduce", "--ring", "Z", "--pi", "2", "--matrix", "[[1,0],[1/2,1]]"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["length"].as_u64().unwrap() >= 2);
    assert_eq!(v["product_verified"], Value::Bool(true));
}

#[test]
fn exit_codes() {
    let o = run(&["witness", "laurent", "--base", "Z[x]", "--x", "2", "--y", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["val", "--ring", "Z[", "--pi", "t", "--expr", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["val", "--ring", "Z[t]", "--pi", "t", "--expr", "t^-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_certificate_round_trips() {
    let o = run(&["--json", "witness", "laurent", "--base", "Z[x]", "--x", "2", "--y", "x"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let cert = sl2gen::expr::load_certificate(&text).unwrap();
    assert_eq!(sl2gen::expr::emit_certificate(&cert), text);
}

#[test]
fn tree_neighbors_and_path() {
    let o = run(&["--json", "tree", "neighbors", "--ring", "Z", "--pi", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["neighbors"].as_array().unwrap().len(), 3);
    let o = run(&["tree", "neighbors", "--ring", "F3[u]", "--pi", "u", "--radius", "2", "--dot"]);
    assert!(stdout(&o).starts_with("graph tree {"));
    let o = run(&["--json", "tree", "path", "--ring", "Z", "--pi", "2", "--matrix", "[[1/4,0],[0,1]]"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["distance"], 2);
}

#[test]
fn searches() {
    let o = run(&["--json", "search-e2", "--ring", "Z[t] loc(t)", "--matrix", "[[1,1/t],[0,1]]", "--depth", "1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "Found");
    let o = run(&["--seed", "7", "--json", "gens", "--ring", "Z[y] loc(y)", "--check-products", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 5);
}
