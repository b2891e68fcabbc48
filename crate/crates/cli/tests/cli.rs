use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_finmet"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error(out: &Output, code: i32) -> Value {
    assert_eq!(out.status.code(), Some(code), "stdout: {}", String::from_utf8_lossy(&out.stdout));
    serde_json::from_slice(&out.stderr).unwrap()
}

const LINE3: &str = r#"{"points": ["0", "1", "2"], "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}"#;
const C4: &str = r#"{"points": ["a", "b", "c", "d"],
  "matrix": [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]]}"#;

#[test]
fn check_ultrametric_on_line() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "line3.json", LINE3);
    let r = report(&run(dir.path(), &["check", "ultrametric", "line3.json"]));
    assert_eq!(r["result"]["defect"], "1");
    assert_eq!(r["result"]["witness"], serde_json::json!(["0", "1", "2"]));
    assert_eq!(r["exact"], true);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn validate_reports_triangle_violation() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", r#"{"points": ["a","b","c"], "matrix": [[0,1,3],[1,0,1],[3,1,0]]}"#);
    let e = error(&run(dir.path(), &["validate", "bad.json"]), 1);
    assert_eq!(e["error"], "TriangleViolation");
    assert_eq!(e["violations"][0]["j"], "b");
    write(dir.path(), "ok.json", LINE3);
    assert_eq!(report(&run(dir.path(), &["validate", "ok.json"]))["result"]["valid"], true);
}

#[test]
fn dist_of_equal_files_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", LINE3);
    write(dir.path(), "b.json", LINE3);
    let r = report(&run(dir.path(), &["dist", "a.json", "b.json"]));
    assert_eq!(r["result"], serde_json::json!({ "sup_dist": "0" }));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(error(&run(dir.path(), &["frobnicate"]), 2)["error"], "Usage");
    write(dir.path(), "c4.json", C4);
    assert_eq!(error(&run(dir.path(), &["check", "doubling", "c4.json"]), 2)["error"], "Usage");
    assert!(run(dir.path(), &["--help"]).status.success());
}

#[test]
fn missing_file_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(error(&run(dir.path(), &["validate", "nope.json"]), 1)["error"], "Io");
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c4.json", C4);
    let args = ["check", "cycl0", "c4.json", "--param", "m=4", "--seed", "7", "--restarts", "4"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &[&args[..], &["--threads", "1"]].concat());
    assert!(a.status.success());
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra["result"], rb["result"]);
    assert_eq!(a.stdout, run(dir.path(), &args).stdout);
    assert_eq!(ra["exact"], false);
    assert_eq!(ra["result"]["violated"], true);
}

#[test]
fn defect_commands() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c4.json", C4);
    let r = report(&run(dir.path(), &["check", "ptolemy", "c4.json"]));
    assert_eq!(r["result"]["defect"], "2");
    let r = report(&run(dir.path(), &["check", "hyperbolicity", "c4.json"]));
    assert_eq!(r["result"]["defect"], "1");
    let r = report(&run(dir.path(), &["check", "hyperbolicity", "c4.json", "--param", "delta=1"]));
    assert_eq!(r["result"]["violated"], false);
    let r = report(&run(dir.path(), &["check", "doubling", "c4.json", "--param", "C=2,alpha=1"]));
    assert_eq!(r["result"]["exhaustive"], true);
    let r = report(&run(dir.path(), &["check", "doubling", "c4.json", "--param", "C=2,alpha=1", "--max-subset", "2"]));
    assert_eq!(r["result"]["exhaustive"], false);
    let r = report(&run(dir.path(), &["check", "ud", "c4.json"]));
    assert_eq!(r["result"]["modulus"], "1/2");
    let r = report(&run(dir.path(), &["check", "inequality", "c4.json", "--expr", "x12 + x23 - x13"]));
    assert_eq!(r["result"]["defect"], "0");
    let r = report(&run(dir.path(), &["check", "cycl0", "c4.json", "--tuple", "a,b,c"]));
    assert_eq!(r["result"]["feasible"], true);
}

#[test]
fn metric_commands_chain_through_reports() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "line3.json", LINE3);
    let out = run(dir.path(), &["scale", "line3.json", "--factor", "1/2", "--output", "half.json"]);
    assert!(out.status.success() && out.stdout.is_empty());
    let r = report(&run(dir.path(), &["diam", "half.json"]));
    assert_eq!(r["result"]["diam"], "1");
    let r = report(&run(dir.path(), &["restrict", "line3.json", "--subset", "0,2"]));
    assert_eq!(r["result"]["metric"]["matrix"][0][1], "2");
    let r = report(&run(dir.path(), &["scale", "line3.json", "--cap", "3/2"]));
    assert_eq!(r["result"]["metric"]["matrix"][0][2], "3/2");
    let r = report(&run(dir.path(), &["embed", "line3.json", "--bounded"]));
    assert_eq!(r["result"]["coords"][2], serde_json::json!(["2", "1", "0"]));
}

#[test]
fn gluing_commands() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "zx.json", r#"{"points": ["z", "x"], "matrix": [[0, 1], [1, 0]]}"#);
    write(dir.path(), "zy.json", r#"{"points": ["z", "y"], "matrix": [[0, 2], [2, 0]]}"#);
    write(dir.path(), "p.json", r#"{"points": ["p"], "matrix": [[0]]}"#);
    let r = report(&run(dir.path(), &["glue-shared", "zx.json", "zy.json"]));
    let m = &r["result"]["metric"];
    assert_eq!(m["points"], serde_json::json!(["z", "x", "y"]));
    assert_eq!(m["matrix"][1][2], "3");
    let r = report(&run(dir.path(), &["glue-bridge", "zx.json", "zx.json", "--r", "1"]));
    assert_eq!(r["result"]["metric"]["matrix"][0][2], "1/2");
    let r = report(&run(dir.path(), &["glue-disjoint", "zx.json", "p.json", "--r", "2", "--a", "x"]));
    assert_eq!(r["result"]["metric"]["matrix"][0][2], "3");
    let r = report(&run(dir.path(), &["glue-sum", "zx.json", "p.json"]));
    assert_eq!(r["result"]["metric"]["points"].as_array().unwrap().len(), 3);
    let e = error(&run(dir.path(), &["glue-bridge", "zx.json", "zy.json", "--r", "1"]), 1);
    assert_eq!(e["error"], "LabelMismatch");
}

#[test]
fn interpolate_command() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "d.json",
        r#"{"points": ["x1", "x2", "x3"], "matrix": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}"#,
    );
    write(dir.path(), "fam.json", r#"{"parts": [["x1", "x2"]]}"#);
    write(dir.path(), "e.json", r#"{"points": ["x1", "x2"], "matrix": [[0, 3], [3, 0]]}"#);
    let r = report(&run(dir.path(), &["interpolate", "d.json", "fam.json", "e.json"]));
    assert_eq!(r["result"]["eta"], "2");
    assert_eq!(r["result"]["witness_pair"], serde_json::json!(["x1", "x2"]));
    assert_eq!(r["result"]["metric"]["matrix"][0][1], "3");
}

#[test]
fn genericity_commands() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&run(dir.path(), &["witness", "ud", "--eps", "1", "--q", "delta=1/2"]));
    assert_eq!(r["result"]["tuple"], serde_json::json!(["0", "1/3", "2/3", "1"]));
    let e = error(&run(dir.path(), &["witness", "hyperbolicity", "--eps", "1"]), 1);
    assert_eq!(e["error"], "NotSingular");

    let r = report(&run(dir.path(), &["blockspace", "ultrametric", "--eps", "1", "--blocks", "1"]));
    assert_eq!(r["result"]["hub"], "∞");
    assert_eq!(r["result"]["metric"]["matrix"][0][1], "1/2");

    write(
        dir.path(),
        "pts.json",
        r#"{"points": ["0", "1/100", "1/50", "10"],
            "matrix": [[0, "1/100", "1/50", 10], ["1/100", 0, "1/100", "999/100"],
                       ["1/50", "1/100", 0, "499/50"], [10, "999/100", "499/50", 0]]}"#,
    );
    let r = report(&run(dir.path(), &["perturb", "ultrametric", "pts.json", "--eps", "1/4"]));
    assert_eq!(r["result"]["cluster"], serde_json::json!(["0", "1/100", "1/50"]));
    let e = error(&run(dir.path(), &["perturb", "ultrametric", "pts.json", "--eps", "1/1000"]), 1);
    assert_eq!(e["error"], "NoSmallCluster");

    write(dir.path(), "pair.json", r#"{"points": ["u", "v"], "matrix": [[0, 1], [1, 0]]}"#);
    let r = report(&run(dir.path(), &["richness", "pts.json", "--target", "pair.json", "--eps", "1/8"]));
    assert_eq!(r["result"]["found"], true);
    assert_eq!(r["result"]["distortion"], "0");
}
