//! Worked-example matrices for the first Hirzebruch surface and its
//! superspace, compared as canonical strings.

mod common;

use std::collections::BTreeMap;

use common::{golden, job, mismatches, structured};
use qdm::Command;
use qdm_core::dmodule::{birkhoff_factorize, connection_from_s};
use qdm_core::floer::FloerModel;
use qdm_core::render::render_scalar;
use qdm_core::ring::CohomologyRing;
use qdm_core::series::{Cutoff, MatrixSeries};
use qdm_core::toric::examples::hirzebruch_super;
use qdm_core::toric::LambdaMode;

fn assert_golden(file: &str, actual: &BTreeMap<String, String>) {
    let bad = mismatches(&golden(file), actual);
    assert!(bad.is_empty(), "{file}:\n{}", bad.join("\n"));
}

fn matrix_entries(key: &str, m: &MatrixSeries, n: usize) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            out.insert(format!("{key}[{},{}]", i + 1, j + 1), render_scalar(&m.entry(i, j)));
        }
    }
    out
}

#[test]
fn hirzebruch_connection() {
    let out = structured(&job(Command::Connection, "f1.toric", Some("3,3")));
    assert_golden("f1_connection.txt", &out);
}

#[test]
fn hirzebruch_quantum_tables() {
    let out = structured(&job(Command::Qh, "f1.toric", Some("3,3")));
    assert_golden("f1_connection.txt", &out);
    assert_eq!(out["product[p1*p1]"], "-q1*p1 + q1*p2");
    assert_eq!(out["product[p1*(p1*p2)]"], "q1*q2");
}

#[test]
fn superspace_connection() {
    let out = structured(&job(Command::Connection, "f1_super.toric", Some("3,4")));
    assert_golden("f1_super_connection.txt", &out);
}

#[test]
fn superspace_birkhoff_and_canonical() {
    let out = structured(&job(Command::Canonical, "f1_super.toric", Some("3,4")));
    assert_golden("f1_super_plus.txt", &out);
    assert_golden("f1_super_canonical.txt", &out);
}

#[test]
fn superspace_flat_connection() {
    let out = structured(&job(Command::Mirror, "f1_super.toric", Some("3,4")));
    assert_golden("f1_super_flat.txt", &out);
    assert_eq!(out["potential_flat"], "-2*q1*q2");
}

#[test]
fn superspace_birkhoff_inverses() {
    let space = hirzebruch_super();
    let ring = CohomologyRing::build(&space).unwrap();
    let n = ring.dim();
    let cut = Cutoff::new(vec![4, 4]);
    let s_inv = FloerModel::new(&space, &ring, LambdaMode::Zero).s_inverse_matrix(&cut).unwrap();
    let (_, s) = connection_from_s(&s_inv, &ring).unwrap();
    let pair = birkhoff_factorize(&s, n).unwrap();
    let plus_inv = pair.plus.invert(n).unwrap();
    assert_golden("f1_super_plus_inverse.txt", &matrix_entries("plus_inverse", &plus_inv, n));
    let minus_inv = pair.minus.invert(n).unwrap().map(|m| m.map(|x| x.window(-3, 0)));
    assert_golden("f1_super_minus_inverse.txt", &matrix_entries("minus_inverse", &minus_inv, n));
}

#[test]
fn golden_files_are_canonical() {
    let cut = Cutoff::new(vec![5, 5]);
    for file in [
        "f1_connection.txt",
        "f1_super_connection.txt",
        "f1_super_plus.txt",
        "f1_super_plus_inverse.txt",
        "f1_super_minus_inverse.txt",
        "f1_super_canonical.txt",
        "f1_super_flat.txt",
    ] {
        for (k, v) in golden(file) {
            let s = qdm_core::render::parse_scalar(&v, &cut).unwrap_or_else(|e| panic!("{file} {k}: {e}"));
            assert_eq!(render_scalar(&s), v, "{file} {k}");
        }
    }
}
