//! Command line behaviour: outputs, exit codes and re-parsing of emitted objects.

mod common;

use std::process::{Command, Output};

use common::fixture_dir;
use crossed::io::{self, Object};

fn ck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ck")).args(args).output().expect("ck runs")
}

fn fixture(stem: &str) -> String {
    fixture_dir().join(format!("{stem}.json")).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("ck-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn pi2_of_cc4() {
    let o = ck(&["pi", &fixture("cc4"), "--stage", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Z/2\n");
    let o = ck(&["pi", &fixture("cc4"), "--stage", "3"]);
    assert_eq!(stdout(&o), "Z^1\n");
    let o = ck(&["pi", &fixture("cc4t"), "--stage", "3"]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn tower_of_rank_two_has_three_stages() {
    let o = ck(&["tower", &fixture("xm_z2_z2_0"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let stages = v["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 3);
    for s in stages {
        let mut doc = s["complex"].clone();
        doc["kind"] = "complex".into();
        let text = serde_json::to_string(&doc).unwrap();
        assert!(matches!(io::parse(&text).unwrap(), Object::Complex(_)));
    }
}

#[test]
fn corrupted_chain_condition_is_located() {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(fixture("r4")).unwrap()).unwrap();
    v["higher"][1]["boundary"]["matrix"]["*"] = serde_json::json!([[1]]);
    let p = scratch("broken.json", &serde_json::to_string_pretty(&v).unwrap());
    let o = ck(&["validate", &p]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("d3 d4") && out.contains("`*`"), "{out}");
}

#[test]
fn parse_errors_give_line_and_column() {
    let p = scratch("bad.json", "{\"kind\": \"groupoid\",\n  \"objects\": [\"a\"],\n  \"arrows\": 7\n}\n");
    let o = ck(&["validate", &p]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let text = std::fs::read_to_string(fixture("Z2")).unwrap().replacen("\"tgt\": \"*\"", "\"tgt\": \"nowhere\"", 1);
    let p = scratch("unknown.json", &text);
    let o = ck(&["validate", &p]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("nowhere"), "{}", stderr(&o));
}

#[test]
fn size_cap_and_range_codes() {
    let o = Command::new(env!("CARGO_BIN_EXE_ck"))
        .args(["pi", &fixture("cc4"), "--stage", "2"])
        .env("CK_SIZE_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(ck(&["pi", &fixture("cc4"), "--stage", "9"]).status.code(), Some(5));
    assert_eq!(ck(&["fiber", &fixture("cc4"), "--stage", "1", "--object", "x"]).status.code(), Some(5));
    assert_eq!(ck(&["pi", &fixture("cc4")]).status.code(), Some(5));
    assert_eq!(ck(&["frobnicate"]).status.code(), Some(5));
    assert_eq!(ck(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("ck-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("w.json");
    let o = ck(&["wbar", &fixture("em3_z2_m1"), "n", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    match io::load(&p).unwrap() {
        Object::Simplicial(s) => {
            assert_eq!(s.n, 2);
            assert_eq!(s.top(), 4);
        }
        _ => panic!("expected a simplicial document"),
    }
}

#[test]
fn torsor_and_em_check_reports() {
    let o = ck(&["torsor", &fixture("cc4t"), "--stage", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["u_split"], true);
    assert_eq!(v["axioms"]["ok"], true);
    assert_eq!(v["exhaustive"], true);
    let o = ck(&["em-check", "3", "2", &fixture("coeff_z3inv_I+Z2")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let o = ck(&["extension", &fixture("s3x"), "--stage", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let middle = &v["sequence"]["middle"];
    let mut doc = middle.clone();
    doc["kind"] = "complex".into();
    let c = io::parse(&serde_json::to_string(&doc).unwrap()).unwrap().into_complex().unwrap();
    assert_eq!(c.rank(), 4);
}

#[test]
fn fixture_files_match_their_constructors() {
    for (stem, obj) in crossed::fixtures::documents() {
        let on_disk = std::fs::read_to_string(fixture(&stem)).unwrap();
        assert_eq!(on_disk, io::to_string(&obj), "{stem}.json is stale; rerun the export_fixtures example");
    }
}
