mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use common::hollow3_roots;

fn distspec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distspec"))
        .args(args)
        .current_dir(dir)
        .env_remove("DISTSPEC_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const COLLINEAR: &str = "0,1,9\n1,0,4\n9,4,0\n";

#[test]
fn verify_accepts_distance_matrix() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("m.csv"), COLLINEAR).unwrap();
    let out = distspec(tmp.path(), &["--out-dir", "o", "--matrix", "m.csv", "verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["classification"], "HSN_plus");
}

#[test]
fn verify_rejects_non_hollow_matrix() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("m.csv"), "1,2\n2,0\n").unwrap();
    let out = distspec(tmp.path(), &["--out-dir", "o", "--matrix", "m.csv", "verify"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["classification"], "invalid");
}

#[test]
fn spectrum_of_collinear_triple() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("m.csv"), COLLINEAR).unwrap();
    let out = distspec(tmp.path(), &["--out-dir", "o", "--matrix", "m.csv", "spectrum"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    let values: Vec<f64> = report["values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (got, want) in values.iter().zip(hollow3_roots(1.0, 9.0, 4.0)) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    assert_eq!(report["inertia"]["n_plus"], 1);
    assert_eq!(report["inertia"]["n_minus"], 2);
}

#[test]
fn scaling_walk_has_no_flow() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("run.toml"),
        r#"
seed = 3

[space]
kind = "minkowski_lp"
dim = 2
p = 1.0

[cloud]
count = 8

[walk]
kind = "scaling"
scale = { kind = "affine", intercept = 0.5, slope = 2.0 }
"#,
    )
    .unwrap();
    let out = distspec(tmp.path(), &["--out-dir", "o", "--config", "run.toml", "flow"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["net_flow"], 0);
    assert_eq!(report["inertia_change"], 0);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = distspec(tmp.path(), &["transmogrify"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn repeated_points_exit_three() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("dup.toml"),
        "[space]\nkind = \"real_line\"\n[cloud]\npoints = [[0.0], [1.0], [1.0]]\n",
    )
    .unwrap();
    let out = distspec(tmp.path(), &["--out-dir", "o", "--config", "dup.toml", "matrix"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn out_dir_from_environment() {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_distspec"))
        .args(["--seed", "5", "sample"])
        .current_dir(tmp.path())
        .env("DISTSPEC_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("from-env/cloud.csv").exists());
    assert_eq!(manifest(&tmp.path().join("from-env"))["seeds"], serde_json::json!([5]));
}

#[test]
fn manifests_list_every_output() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("small.toml"),
        r#"
[cloud]
count = 9

[walk]
kind = "linear"

[growth]
p_values = [1.0, 2.0]
sizes = [4, 8]
seeds = [0, 1]

[divergence]
sizes = [20, 40]
seeds = [0]

[flow_scan]
size = 5
trials = 3
steps = 32
"#,
    )
    .unwrap();
    let commands: &[&[&str]] = &[
        &["sample"],
        &["matrix"],
        &["spectrum"],
        &["ladder"],
        &["census"],
        &["flow"],
        &["flow", "--scan"],
        &["growth"],
        &["diverge"],
        &["verify"],
    ];
    for (k, command) in commands.iter().enumerate() {
        let dir = format!("out{k}");
        let mut args = vec!["--out-dir", &dir, "--config", "small.toml"];
        args.extend_from_slice(command);
        let out = distspec(tmp.path(), &args);
        assert_eq!(out.status.code(), Some(0), "{command:?}: {}", String::from_utf8_lossy(&out.stderr));
        let dir = tmp.path().join(&dir);
        let m = manifest(&dir);
        let listed: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        assert!(!listed.is_empty(), "{command:?}");
        let mut on_disk: Vec<String> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n != "manifest.json")
            .collect();
        on_disk.sort();
        let mut listed_sorted: Vec<String> = listed.iter().map(|s| s.to_string()).collect();
        listed_sorted.sort();
        assert_eq!(on_disk, listed_sorted, "{command:?}");
        assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn manifest_replay_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let first = distspec(tmp.path(), &["--out-dir", "a", "--seed", "11", "ladder"]);
    assert_eq!(first.status.code(), Some(0));
    let second = distspec(tmp.path(), &["--out-dir", "b", "--config", "a/manifest.json", "ladder"]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    for name in manifest(&tmp.path().join("a"))["outputs"].as_array().unwrap() {
        let name = name.as_str().unwrap();
        assert_eq!(
            fs::read(tmp.path().join("a").join(name)).unwrap(),
            fs::read(tmp.path().join("b").join(name)).unwrap(),
            "{name}"
        );
    }
}
