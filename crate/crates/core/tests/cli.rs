// Copyright 2026 The madelung authors
//
// Licensed under the Apache license, version 2.0 (the "license");
// you may not use this file except in compliance with the license.
// You may obtain a copy of the license at
//
//     http://www.apache.org/licenses/license-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the license is distributed on an "as is" basis,
// without warranties or conditions of any kind, either express or implied.
// See the license for the specific language governing permissions and
// limitations under the license.

use std::fs;
use std::process::{Command, Output};

use madelung::harness::config::load_config;
use madelung::harness::Method;

fn madelung(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_madelung")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn energy_prints_one_line() {
    let out = madelung(&["energy", "--preset", "cscl"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let line = text.trim();
    assert!(line.starts_with("method=ewald s=1"), "{line}");
    let value: f64 = line.rsplit("value=").next().unwrap().parse().unwrap();
    assert!((value + 2.0353615095).abs() < 1e-9);
}

#[test]
fn converge_writes_csv_rows() {
    let out = madelung(&["converge", "--preset", "rocksalt", "--method", "wolf", "--r", "10:40:31"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 32);
    let width = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == width));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(madelung(&["energy", "--preset", "rocksalt", "--method", "bogus"]).status.code(), Some(2));
    assert_eq!(madelung(&["energy", "--preset", "rocksalt", "--method", "wolf_damped"]).status.code(), Some(2));
    assert_eq!(madelung(&["energy", "--preset", "nonesuch"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    assert_eq!(madelung(&["energy", "--config", "/nonexistent/run.json"]).status.code(), Some(3));
    let out = madelung(&["converge", "--preset", "cscl", "--r", "2:4:3", "--method", "sphere", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn failing_suite_exits_1() {
    let out = madelung(&["check", "--suite", "theorem"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).trim_end().ends_with("FAIL"));
}

#[test]
fn passing_suite_exits_0() {
    let out = madelung(&["check", "--suite", "residue", "--suite", "functional"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("suite=")).all(|l| !l.ends_with("pass=false")));
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(
        &path,
        r#"{"cell": {"lattice": {"e1": [1,0,0], "e2": [0,1,0], "e3": [0,0,1]},
                     "sites": [{"q": 1, "frac": [0,0,0]}, {"q": -1, "frac": [0.5,0.5,0.5]}]},
            "method": "ewald", "s": 1}"#,
    )
    .unwrap();
    let config = load_config(&path).unwrap();
    assert_eq!(config.method, Method::Ewald);
    let from_file = stdout(&madelung(&["energy", "--config", path.to_str().unwrap()]));
    let from_preset = stdout(&madelung(&["energy", "--preset", "cscl"]));
    assert_eq!(from_file, from_preset);
}

#[test]
fn serial_output_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = ["converge", "--preset", "hexagonal_test", "--method", "sphere", "--r", "3:12:10", "--out"];
    let run = |path: &std::path::Path, serial: bool| {
        let mut args = base.to_vec();
        args.push(path.to_str().unwrap());
        if serial {
            args.push("--serial");
        }
        assert_eq!(madelung(&args).status.code(), Some(0));
        fs::read(path).unwrap()
    };
    assert_eq!(run(&a, false), run(&b, true));
}

#[test]
fn sweep_alpha_csv() {
    let out = madelung(&["sweep-alpha", "--preset", "rocksalt", "--alpha", "0.5,1.0", "--r", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,bias");
    assert_eq!(lines.len(), 3);
}
