// Copyright 2026 The qsvd Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


use std::path::Path;
use std::process::{Command, Output};

use qsvd_core::io::read_matrix;
use serde_json::Value;
use tempfile::TempDir;

fn qsvd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsvd"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = qsvd(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_matrix_is_readable() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen-matrix", "--n", "8", "--rank", "2", "--seed", "7", "--out", "a.json"]);
    let a = read_matrix(&dir.path().join("a.json")).unwrap();
    assert_eq!((a.rows(), a.cols()), (8, 8));
    assert!(a.hermitian_deviation() <= 1e-12);
    assert!(!dir.path().join("a.extended.json").exists());
}

#[test]
fn rectangular_gen_matrix_writes_extended_companion() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen-matrix", "--m", "3", "--n", "5", "--rank", "2", "--out", "b.json"]);
    let a = read_matrix(&dir.path().join("b.json")).unwrap();
    let ext = read_matrix(&dir.path().join("b.extended.json")).unwrap();
    assert_eq!((a.rows(), a.cols(), ext.rows()), (3, 5, 8));
    assert_eq!(ext.block(0, 3, 3, 5), a);
}

#[test]
fn error_sweep_is_deterministic() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen-matrix", "--n", "8", "--rank", "2", "--seed", "7", "--out", "a.json"]);
    let args = ["error-sweep", "--matrix", "a.json", "--dts", "0.01,0.005,0.0025", "--seed", "3", "--out", "s.csv"];
    ok(dir.path(), &args);
    let s1 = std::fs::read(dir.path().join("s.csv")).unwrap();
    ok(dir.path(), &args);
    let s2 = std::fs::read(dir.path().join("s.csv")).unwrap();
    assert_eq!(s1, s2);
    let text = String::from_utf8(s1).unwrap();
    assert!(text.lines().any(|l| l == "delta_t,measured_error,bound,ratio"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[1] <= f[2], "{row}");
    }
}

#[test]
fn evolve_meets_error_budget() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen-matrix", "--n", "4", "--rank", "2", "--scale", "0.25", "--out", "a.json"]);
    ok(dir.path(), &["evolve", "--matrix", "a.json", "--time", "1", "--epsilon", "0.05", "--out", "e.json"]);
    let env = json(&dir.path().join("e.json"));
    let total = env["result"]["report"]["total_measured"].as_f64().unwrap();
    assert!(total <= 0.05, "{total}");
    assert!(env["oracle_calls"].as_u64().unwrap() > 0);
    assert_eq!(env["config"]["command"]["name"], "evolve");
}

#[test]
fn replay_reproduces_bytes() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["svd", "--generator", "random-lowrank:m=3,n=4,r=2", "--bits", "10", "--seed", "4", "--out", "s.json"]);
    let replay = ok(dir.path(), &["--replay", "s.json"]);
    assert_eq!(replay.stdout, std::fs::read(dir.path().join("s.json")).unwrap());
}

#[test]
fn stdout_when_no_out() {
    let dir = TempDir::new().unwrap();
    let out = ok(dir.path(), &["qpe", "--generator", "diagonal:1,-1", "--bits", "3", "--base-time", "3.141592653589793"]);
    let env: Value = serde_json::from_slice(&out.stdout).unwrap();
    let dist = env["result"]["distribution"].as_array().unwrap();
    assert_eq!(dist.len(), 8);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(qsvd(dir.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(qsvd(dir.path(), &["evolve", "--generator", "all-ones:n=2"]).status.code(), Some(2));
    let aliasing = qsvd(dir.path(), &["qpe", "--generator", "all-ones:n=2", "--bits", "3", "--base-time", "10"]);
    assert_eq!(aliasing.status.code(), Some(2));
    let missing = qsvd(dir.path(), &["svd", "--matrix", "absent.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("absent.json"));
    let unwritable = qsvd(
        dir.path(),
        &["gen-matrix", "--n", "2", "--rank", "1", "--out", "no/such/dir/a.json"],
    );
    assert_eq!(unwritable.status.code(), Some(1));
    assert_eq!(qsvd(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn version_names_artifact_and_format() {
    let out = ok(Path::new("."), &["--version"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("qsvd 0.1.0"), "{text}");
    assert!(text.contains("result format 1"));
}
