//! The invariant suite over small families beyond the shipped fixtures.

use qdm_core::arith::Laurent;
use qdm_core::pipeline::{Pipeline, Status};
use qdm_core::render::render_scalar;
use qdm_core::series::{Cutoff, Exponent, LMatrix};
use qdm_core::toric::{LambdaMode, ToricSuperspace};

fn hirzebruch(k: i64, l: Vec<Vec<i64>>) -> ToricSuperspace {
    ToricSuperspace::new(
        vec![vec![1, 0], vec![-1, -k], vec![0, 1], vec![0, -1]],
        vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
        vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![-k, 1]],
        l,
    )
    .unwrap()
}

fn projective(n: usize, l: Vec<Vec<i64>>) -> ToricSuperspace {
    let mut rays: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    rays.push(vec![-1; n]);
    let cones = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    ToricSuperspace::new(rays, cones, vec![vec![1]; n + 1], l).unwrap()
}

fn assert_suite(name: &str, space: ToricSuperspace, orders: &[u32], mode: LambdaMode) -> Pipeline {
    let p = Pipeline::run(space, Cutoff::new(orders.to_vec()), mode).unwrap();
    let report = p.verify();
    let failures: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    assert!(failures.is_empty(), "{name}: {failures:?}");
    p
}

#[test]
fn hirzebruch_family() {
    for k in 0..=3 {
        let p = assert_suite(&format!("F{k}"), hirzebruch(k, vec![]), &[2, 2], LambdaMode::Zero);
        let skipped = p.verify().get("mirror transformation").map(|c| c.status) == Some(Status::Skipped);
        // deg q1 = 2(2 - k)
        assert_eq!(skipped, k > 2, "F{k}");
    }
}

#[test]
fn projective_spaces_with_bundles() {
    for n in 1..=3 {
        assert_suite(&format!("P{n}"), projective(n, vec![]), &[3], LambdaMode::Zero);
    }
    assert_suite("P1 with O(1)", projective(1, vec![vec![1]]), &[3], LambdaMode::Zero);
    assert_suite("P2 with O(1)", projective(2, vec![vec![1]]), &[3], LambdaMode::Symbolic);
    assert_suite("P2 with O(3)", projective(2, vec![vec![3]]), &[3], LambdaMode::Zero);
    assert_suite("P3 with O(2)+O(2)", projective(3, vec![vec![2], vec![2]]), &[3], LambdaMode::Zero);
}

#[test]
fn projective_line_connection() {
    let p = Pipeline::run(projective(1, vec![]), Cutoff::new(vec![3]), LambdaMode::Zero).unwrap();
    let mut expected = LMatrix::zero(2);
    expected.set(1, 0, Laurent::one());
    assert_eq!(p.connection.get(0).constant_term(), Some(&expected));
    let q = p.connection.get(0).get(&Exponent(vec![1])).unwrap();
    assert_eq!(q.get(0, 1), &Laurent::one());
    assert_eq!(p.connection.get(0).terms().count(), 2);
}

#[test]
fn quintic_like_bundle_has_mirror_corrections() {
    // P2 with O(3): deg q = 0 and the flat coordinate differs from q
    let p = assert_suite("P2 with O(3)", projective(2, vec![vec![3]]), &[3], LambdaMode::Zero);
    let stage = p.mirror.as_ref().unwrap();
    assert!(!stage.data.delta[0].is_zero());
    // log q^ = log q + I1/I0 with I0 = Σ (3d)!/(d!)^3 q^d and
    // I1 = Σ (3d)!/(d!)^3 · 3(H_{3d} − H_d) q^d; at d = 1 this is 6 · 3 · 5/6 = 15
    assert_eq!(render_scalar(&stage.data.delta[0]).split(' ').next(), Some("-15*q1"));
}

#[test]
fn enlarging_the_box_only_adds_terms() {
    let small = Cutoff::new(vec![2, 2]);
    let space = qdm_core::toric::examples::hirzebruch_super();
    let a = Pipeline::run(space.clone(), small.clone(), LambdaMode::Zero).unwrap();
    let b = Pipeline::run(space, Cutoff::new(vec![3, 4]), LambdaMode::Zero).unwrap();
    assert_eq!(b.birkhoff.plus.truncate(&small), a.birkhoff.plus);
    assert_eq!(b.birkhoff.minus.truncate(&small), a.birkhoff.minus);
    for k in 0..2 {
        assert_eq!(b.canonical.get(k).truncate(&small), *a.canonical.get(k));
        let (fa, fb) = (&a.mirror.as_ref().unwrap().flat, &b.mirror.as_ref().unwrap().flat);
        assert_eq!(fb.get(k).truncate(&small), *fa.get(k));
    }
}
