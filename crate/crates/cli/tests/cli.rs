use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str], config: &Path) -> (Output, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_cycpair"))
        .arg(args[0])
        .arg(config)
        .args(&args[1..])
        .output()
        .expect("binary runs");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out, v)
}

const X3: &str = "n = 1\nweights = [1]\nf = [[1, [3]]]\n";
const X2: &str = "n = 1\nweights = [1]\nf = [[1, [2]]]\ncentral = [[1, [1]]]\n\n[cutoffs]\nz_lift = \"solved\"\n";

#[test]
fn milnor_on_cubic() {
    let d = TempDir::new().unwrap();
    let (out, v) = run(&["milnor"], &write(&d, "x3.toml", X3));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["mu"], 2);
    assert_eq!(v["socle"]["monomial"], "x");
    assert_eq!(v["residue_gram"][0][1], "1/3");
}

#[test]
fn milnor_on_three_squares() {
    let d = TempDir::new().unwrap();
    let cfg = "n = 3\nweights = [1, 1, 1]\nf = [[1, [2, 0, 0]], [1, [0, 2, 0]], [1, [0, 0, 2]]]\n";
    let (out, v) = run(&["milnor"], &write(&d, "q.toml", cfg));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["mu"], 1);
}

#[test]
fn non_homogeneous_input_is_a_config_error() {
    let d = TempDir::new().unwrap();
    let cfg = "n = 1\nweights = [1]\nf = [[1, [3]], [1, [2]]]\n";
    let (out, v) = run(&["milnor"], &write(&d, "bad.toml", cfg));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not quasi-homogeneous"));
    assert_eq!(v["exit_code"], 2);
}

#[test]
fn malformed_toml_is_a_config_error() {
    let d = TempDir::new().unwrap();
    let (out, _) = run(&["milnor"], &write(&d, "bad.toml", "n = 1\nweights = [1]\nf = [[1, [3]]]\nbogus = 4\n"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_samples_give_an_empty_report() {
    let d = TempDir::new().unwrap();
    let (out, v) = run(&["identities", "--samples", "0"], &write(&d, "x3.toml", X3));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["suites"].as_array().unwrap().len(), 0);
}

#[test]
fn identity_suite_passes_and_catches_a_corrupted_tau() {
    let d = TempDir::new().unwrap();
    let cfg = write(&d, "x3.toml", X3);
    let (out, v) = run(&["identities", "--samples", "15"], &cfg);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["passed"], true);
    let (out, v) = run(&["identities", "--samples", "15", "--corrupt", "tau"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(v["passed"], false);
}

#[test]
fn verify_quadric_and_write_json_file() {
    let d = TempDir::new().unwrap();
    let cfg = write(&d, "x2.toml", X2);
    let out_path = d.path().join("report.json");
    let (out, _) = run(&["verify", "--samples", "20", "--json", out_path.to_str().unwrap()], &cfg);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["corollary"]["const"], "-1/1");
    assert_eq!(v["corollary"]["conjecture"]["matches"], true);
    assert_eq!(v["bridge"]["passed"], true);
    assert_eq!(v["flatness"]["passed"], true);
    assert!(v["flatness"]["nontrivial"].as_u64().unwrap() > 0);
}

#[test]
fn corrupted_epsilon_fails_the_bridge() {
    let d = TempDir::new().unwrap();
    let (out, v) = run(&["verify", "--samples", "20", "--corrupt", "epsilon"], &write(&d, "x3.toml", X3));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(v["bridge"]["passed"], false);
}

#[test]
fn small_window_is_a_resource_error() {
    let d = TempDir::new().unwrap();
    let cfg = write(&d, "x3.toml", X3);
    for flags in [["--weight-window", "0,0", "--margin", "3"], ["--weight-window", "5,10", "--margin", "1"]] {
        let mut args = vec!["verify", "--samples", "0"];
        args.extend(flags);
        let (out, v) = run(&args, &cfg);
        assert_eq!(out.status.code(), Some(3));
        assert!(v["error"].as_str().unwrap().contains("window too small"));
    }
}

#[test]
fn reports_are_deterministic() {
    let d = TempDir::new().unwrap();
    let cfg = write(&d, "x3.toml", X3);
    let args = ["verify", "--samples", "10", "--seed", "7"];
    let (a, _) = run(&args, &cfg);
    let (b, _) = run(&args, &cfg);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
