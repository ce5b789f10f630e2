//! Runs the `qdm` binary end to end.

mod common;

use std::io::Write;
use std::process::{Command, Output};

use common::{fixture, golden};
use qdm::parse_structured;

fn qdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdm")).args(args).env("QDM_THREADS", "2").output().expect("binary runs")
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn temp_input(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("qdm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::File::create(&p).unwrap().write_all(text.as_bytes()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn qh_prints_connection_and_products() {
    let out = qdm(&["qh", &path("f1.toric"), "--cutoff", "3,3", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let lines = parse_structured(&String::from_utf8(out.stdout).unwrap()).unwrap();
    for line in golden("f1_connection.txt") {
        assert!(lines.contains(&line), "missing {line:?}");
    }
    assert!(lines.contains(&("product[p1*p1]".into(), "-q1*p1 + q1*p2".into())));
}

#[test]
fn check_passes_on_superspace() {
    let out = qdm(&["check", &path("f1_super.toric"), "--cutoff", "3,4", "--lambda", "zero"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("fail"));
}

#[test]
fn named_cutoff_matches_positional() {
    let a = qdm(&["connection", &path("f1_super.toric"), "--cutoff", "3,4"]);
    let b = qdm(&["connection", &path("f1_super.toric"), "--cutoff", "a=3,b=4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_is_deterministic() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qdm"))
            .args(["mirror", &path("f1_super.toric"), "--cutoff", "2,3", "--format", "structured"])
            .env("QDM_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let first = run("1");
    assert!(!first.is_empty());
    assert_eq!(first, run("1"));
    assert_eq!(first, run("4"));
}

#[test]
fn mirror_on_negative_degree_exits_4() {
    let out = qdm(&["mirror", &path("p1_negdeg.toric")]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative"));
    let out = qdm(&["qh", &path("p1_negdeg.toric")]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn check_skips_mirror_when_not_nef() {
    let out = qdm(&["check", &path("p1_negdeg.toric"), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("check[mirror transformation] = skipped"));
}

#[test]
fn parse_errors_exit_1() {
    let bad = temp_input("bad.toric", "rays = [[1], [-1]\n");
    assert_eq!(qdm(&["ring", &bad]).status.code(), Some(1));
    assert_eq!(qdm(&["ring", "/nonexistent/input.toric"]).status.code(), Some(1));
    assert_eq!(qdm(&["ring", &path("f1.toric"), "--cutoff", "3"]).status.code(), Some(1));
    assert_eq!(qdm(&["ring", &path("f1.toric"), "--lambda", "half"]).status.code(), Some(1));
    assert_eq!(qdm(&["frobnicate", &path("f1.toric")]).status.code(), Some(1));
}

#[test]
fn validation_errors_exit_2() {
    // the rows (1,0),(1,0),(1,1),(0,1) are a Gale dual of the F1 fan but
    // not a nef basis
    let text = "rays = [[1, 0], [-1, -1], [0, 1], [0, -1]]\n\
                max_cones = [[1, 3], [3, 2], [2, 4], [4, 1]]\n\
                m = [[1, 0], [1, 0], [1, 1], [0, 1]]\n";
    let input = temp_input("notnef.toric", text);
    let out = qdm(&["validate", &input, "--format", "structured"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("check[nef basis] = fail"));
    assert_eq!(qdm(&["qh", &input]).status.code(), Some(2));
    let incomplete = temp_input("incomplete.toric", "rays = [[1], [-1]]\nmax_cones = [[1]]\nm = [[1], [1]]\n");
    assert_eq!(qdm(&["validate", &incomplete]).status.code(), Some(2));
}

#[test]
fn every_subcommand_runs_on_f1() {
    for cmd in ["validate", "ring", "jfun", "pf", "connection", "canonical", "mirror", "qh", "pairing", "check"] {
        let out = qdm(&[cmd, &path("f1.toric"), "--cutoff", "2,2"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty(), "{cmd}");
    }
}

#[test]
fn flat_potential_uses_flat_names() {
    let out = qdm(&["mirror", &path("f1_super.toric"), "--format", "structured"]);
    let lines = parse_structured(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(lines.contains(&("potential_flat".into(), "-2*q1*q2".into())));
}
