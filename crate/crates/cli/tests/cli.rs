use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn curves() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../curves")
}

fn peano(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peano")).args(args).env_remove("PEANO_MAX_MEM").output().unwrap()
}

fn hilbert() -> String {
    curves().join("hilbert.json").to_string_lossy().into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn validate_hilbert() {
    let o = peano(&["validate", &hilbert()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["failures"], Value::Array(vec![]));
    assert_eq!(v["caps"]["max_points"], 20000);
}

#[test]
fn invalid_curve_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(hilbert()).unwrap().replace("\"iso\": \"md\"", "\"iso\": \"e\"");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, text).unwrap();
    let o = peano(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!json(&o)["result"]["failures"].as_array().unwrap().is_empty());
    assert_eq!(peano(&["oracle", path.to_str().unwrap(), "--depth", "1"]).status.code(), Some(1));
}

#[test]
fn parse_errors_name_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(hilbert()).unwrap().replace("\"iso\": \"ma\"", "\"iso\": \"rot\"");
    let path = dir.path().join("typo.json");
    std::fs::write(&path, text).unwrap();
    let o = peano(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 7") && err.contains("fractions[3].iso") && err.contains("r1, r2, r3"), "{err}");
}

#[test]
fn eval_entry_point() {
    let v = json(&peano(&["eval", &hilbert(), "--t", "0/1"]));
    assert_eq!(v["result"]["point"], serde_json::json!(["0/1", "0/1"]));
    let v = json(&peano(&["eval", &hilbert(), "--t", "1/2", "--depth", "2"]));
    assert_eq!(v["result"]["point"], serde_json::json!(["1/2", "1/2"]));
    assert_eq!(v["result"]["enclosure"]["depth"], 2);
    assert_eq!(peano(&["eval", &hilbert(), "--t", "3/2"]).status.code(), Some(2));
}

#[test]
fn dilation_brackets_six() {
    let h = hilbert();
    for extra in [&[][..], &["--via-junctions"][..]] {
        let mut args = vec!["dilation", h.as_str(), "--tol", "1/1000"];
        args.extend_from_slice(extra);
        let o = peano(&args);
        assert_eq!(o.status.code(), Some(0));
        let r = &json(&o)["result"];
        assert_eq!(r["lower"], "6/1");
        let upper: peano::geometry::Rational = r["upper"].as_str().unwrap().parse().unwrap();
        assert!(upper >= peano::geometry::Rational::from_int(6));
    }
}

#[test]
fn caps_exit_3_with_partial_results() {
    let o = peano(&["dilation", &hilbert(), "--tol", "1/1000", "--max-nodes", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["result"]["cap"]["kind"], "nodes");
    assert_eq!(peano(&["oracle", &hilbert(), "--depth", "9"]).status.code(), Some(3));
    assert_eq!(peano(&["oracle", &hilbert(), "--depth", "3", "--max-points", "10"]).status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_peano"))
        .args(["scan", &hilbert(), "--depth", "6"])
        .env("PEANO_MAX_MEM", "1K")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_peano"))
        .args(["scan", &hilbert(), "--depth", "1"])
        .env("PEANO_MAX_MEM", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(peano(&["dilation", &hilbert()]).status.code(), Some(2));
    assert_eq!(peano(&["dilation", &hilbert(), "--tol", "0/1"]).status.code(), Some(2));
    assert_eq!(peano(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(peano(&["validate", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(peano(&["enumerate", "--k", "4"]).status.code(), Some(2));
    assert_eq!(peano(&["blob", &hilbert(), "--depth", "2", "--from", "9", "--to", "3"]).status.code(), Some(2));
}

#[test]
fn csv_outputs_have_headers() {
    let o = peano(&["dilation", &hilbert(), "--tol", "1/100", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("lower,upper,width,witness_t,witness_t2"));
    let o = peano(&["scan", &hilbert(), "--depth", "2", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 17);
    assert_eq!(text.lines().next(), Some("position,col,row"));
}

#[test]
fn enumerate_lines_are_curve_files() {
    let o = peano(&["enumerate", "--k", "2", "--dedup", "--side-adjacent"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    for line in text.lines() {
        let c = peano_cli::format::parse_curve(line).unwrap();
        assert!(c.validate().is_valid() && c.is_canonical());
    }
    let o = peano(&["enumerate", "--k", "3", "--max-curves", "7", "--format", "csv"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 8);
}

#[test]
fn search_reports_records_then_summary() {
    let o = peano(&["search", "--k", "2", "--tol", "1/100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let (last, records) = lines.split_last().unwrap();
    assert!(records.iter().all(|r| r["type"] == "record"));
    assert_eq!(last["type"], "summary");
    assert_eq!(last["outcome"]["best"]["estimate"]["lower"], "6/1");
    assert_eq!(last["outcome"]["stats"]["enumerated"], 10);
    assert!(String::from_utf8(o.stderr).unwrap().contains("progress:"));
}

#[test]
fn blob_and_junctions() {
    let v = json(&peano(&["blob", &hilbert(), "--depth", "2", "--from", "0", "--to", "3"]));
    assert_eq!(v["result"]["area"], 4);
    assert_eq!(v["result"]["diameter_sq"], 2);
    let v = json(&peano(&["junctions", &hilbert()]));
    assert_eq!(v["result"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_identical_across_job_counts() {
    let g9 = curves().join("genus9_min.json").to_string_lossy().into_owned();
    for args in [
        vec!["dilation", g9.as_str(), "--tol", "1/1000"],
        vec!["dilation", g9.as_str(), "--tol", "1/1000", "--via-junctions"],
        vec!["oracle", g9.as_str(), "--depth", "2"],
        vec!["search", "--k", "3", "--tol", "1/100", "--max-curves", "700", "--side-adjacent"],
    ] {
        let one = peano(&[&args[..], &["--jobs", "1"]].concat());
        let four = peano(&[&args[..], &["--jobs", "4"]].concat());
        assert_eq!(one.status.code(), Some(0), "{args:?}");
        assert_eq!(one.stdout, four.stdout, "{args:?}");
        assert_eq!(one.stdout, peano(&args).stdout, "{args:?}");
    }
}
