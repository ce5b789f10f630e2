//! Algebraic laws of truncated series, checked on random inputs.

use proptest::prelude::*;
use qdm_core::arith::{rat, ratio, LambdaPoly, Laurent};
use qdm_core::dmodule::{birkhoff_factorize, BirkhoffPair};
use qdm_core::series::{
    log_integrate, reverse_coordinates, substitute, Cutoff, Exponent, LMatrix, MatrixSeries, ScalarSeries,
};

const ORDERS: [u32; 2] = [2, 2];

fn cutoff() -> Cutoff {
    Cutoff::new(ORDERS.to_vec())
}

/// `(q1 exponent, q2 exponent, h exponent, lambda degree, numerator, denominator)`.
type Term = (u32, u32, i32, usize, i64, i64);

fn term(hbar: std::ops::RangeInclusive<i32>, lambda: usize) -> impl Strategy<Value = Term> {
    (0..=ORDERS[0], 0..=ORDERS[1], hbar, 0..=lambda, -5i64..=5, 1i64..=3)
}

fn build(terms: &[Term], skip_constant: bool) -> ScalarSeries {
    let mut s = ScalarSeries::new(cutoff());
    for &(a, b, k, m, num, den) in terms {
        if skip_constant && a == 0 && b == 0 {
            continue;
        }
        let mut coeffs = vec![rat(0); m + 1];
        coeffs[m] = ratio(num, den);
        s.add_term(Exponent(vec![a, b]), Laurent::monomial(k, LambdaPoly::from_coeffs(coeffs)));
    }
    s
}

fn series() -> impl Strategy<Value = ScalarSeries> {
    prop::collection::vec(term(-2..=2, 1), 0..8).prop_map(|t| build(&t, false))
}

/// Rational series without `h` or `lambda` and with zero constant term.
fn plain_series() -> impl Strategy<Value = ScalarSeries> {
    prop::collection::vec(term(0..=0, 0), 0..6).prop_map(|t| build(&t, true))
}

fn unit_series() -> impl Strategy<Value = ScalarSeries> {
    (series(), 1i64..=4).prop_map(|(s, c)| {
        let mut out = ScalarSeries::new(cutoff());
        out.add_term(Exponent::zero(2), Laurent::from_int(c));
        for (d, x) in s.terms() {
            if !d.is_zero() {
                out.add_term(d.clone(), x.clone());
            }
        }
        out
    })
}

/// `I + Σ_{d ≠ 0} q^d M_d` with entries confined to the given `h` range.
fn matrix_factor(hbar: std::ops::RangeInclusive<i32>) -> impl Strategy<Value = MatrixSeries> {
    prop::collection::vec((term(hbar, 0), 0usize..2, 0usize..2), 0..8).prop_map(|entries| {
        let mut m = MatrixSeries::identity(cutoff(), 2);
        for ((a, b, k, _, num, den), i, j) in entries {
            if a == 0 && b == 0 {
                continue;
            }
            let mut c = LMatrix::zero(2);
            c.set(i, j, Laurent::monomial(k, LambdaPoly::constant(ratio(num, den))));
            m.add_term(Exponent(vec![a, b]), c);
        }
        m
    })
}

proptest! {
    #[test]
    fn multiplication_is_a_commutative_ring(x in series(), y in series(), z in series()) {
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.mul(&ScalarSeries::one(cutoff())), x.clone());
        prop_assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn unit_inverse_round_trips(u in unit_series()) {
        let inv = u.inverse().unwrap();
        prop_assert_eq!(u.mul(&inv), ScalarSeries::one(cutoff()));
    }

    #[test]
    fn matrix_inverse_round_trips(m in matrix_factor(-2..=2)) {
        let inv = m.invert(2).unwrap();
        prop_assert_eq!(m.mul(&inv), MatrixSeries::identity(cutoff(), 2));
        prop_assert_eq!(inv.mul(&m), MatrixSeries::identity(cutoff(), 2));
    }

    #[test]
    fn hbar_split_recombines(x in series()) {
        let (plus, minus) = x.split_hbar();
        prop_assert_eq!(plus.add(&minus), x);
        prop_assert!(plus.hbar_exponents().iter().all(|&k| k >= 0));
        prop_assert!(minus.hbar_exponents().iter().all(|&k| k < 0));
    }

    #[test]
    fn log_integrate_inverts_log_derivative(f in plain_series()) {
        let g: Vec<ScalarSeries> = (0..2).map(|a| f.log_derivative(a)).collect();
        prop_assert_eq!(log_integrate(&g).unwrap(), f);
    }

    #[test]
    fn coordinate_change_round_trips(
        e1 in plain_series(),
        e2 in plain_series(),
        s in series(),
    ) {
        let eps = vec![e1, e2];
        let delta = reverse_coordinates(&eps).unwrap();
        let there = substitute(&s, &delta).unwrap();
        prop_assert_eq!(substitute(&there, &eps).unwrap(), s);
    }

    #[test]
    fn birkhoff_factors_are_unique(plus in matrix_factor(0..=2), minus in matrix_factor(-2..=-1)) {
        let pair = birkhoff_factorize(&plus.mul(&minus), 2).unwrap();
        prop_assert_eq!(pair, BirkhoffPair { plus, minus });
    }

    #[test]
    fn exponent_order_starts_with_total_degree(a in 0u32..4, b in 0u32..4, c in 0u32..4, d in 0u32..4) {
        let (x, y) = (Exponent(vec![a, b]), Exponent(vec![c, d]));
        if a + b < c + d {
            prop_assert!(x < y);
        }
        let cut = Cutoff::new(vec![3, 3]);
        let exps = cut.exponents();
        prop_assert!(exps.windows(2).all(|w| w[0] < w[1]));
    }
}
