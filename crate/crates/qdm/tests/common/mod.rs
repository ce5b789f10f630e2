#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use qdm::{parse_structured, run, Command, Format, JobConfig, Outcome};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn golden(name: &str) -> Vec<(String, String)> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_structured(&text).expect("well-formed golden file")
}

pub fn job(command: Command, file: &str, cutoff: Option<&str>) -> Outcome {
    let config = JobConfig {
        input: fixture(file),
        command,
        cutoff: cutoff.map(str::to_string),
        lambda: None,
        format: Format::Structured,
        threads: 2,
    };
    run(&config)
}

pub fn structured(out: &Outcome) -> BTreeMap<String, String> {
    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    parse_structured(&out.stdout).expect("structured output").into_iter().collect()
}

/// Entries of `expected` that differ from `actual`, as readable lines.
pub fn mismatches(expected: &[(String, String)], actual: &BTreeMap<String, String>) -> Vec<String> {
    expected
        .iter()
        .filter(|(k, v)| actual.get(k) != Some(v))
        .map(|(k, v)| format!("{k}: expected `{v}`, got `{}`", actual.get(k).map_or("<missing>", String::as_str)))
        .collect()
}
