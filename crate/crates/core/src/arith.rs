//! Exact scalar arithmetic: rationals, polynomials in the fiber weight
//! `λ`, and Laurent polynomials in the loop weight `ħ`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial in `λ` with rational coefficients. Trailing zeros are trimmed,
/// so the zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LambdaPoly {
    coeffs: Vec<Rational>,
}

impl LambdaPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The generator `λ`.
    pub fn lambda() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Degree in `λ`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// The value if this polynomial does not involve `λ`.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn at_zero(&self) -> Rational {
        self.coeff(0)
    }
}

impl From<Rational> for LambdaPoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl AddAssign<&LambdaPoly> for LambdaPoly {
    fn add_assign(&mut self, rhs: &LambdaPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.trim();
    }
}

impl SubAssign<&LambdaPoly> for LambdaPoly {
    fn sub_assign(&mut self, rhs: &LambdaPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.trim();
    }
}

impl Add for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: &LambdaPoly) -> LambdaPoly {
        if self.is_zero() || rhs.is_zero() {
            return LambdaPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LambdaPoly::from_coeffs(out)
    }
}

/// Laurent polynomial in `ħ` whose coefficients are polynomials in `λ`.
///
/// This is the entry type of every connection, gauge and solution matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Laurent {
    terms: BTreeMap<i32, LambdaPoly>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::monomial(0, LambdaPoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn from_lambda_poly(p: LambdaPoly) -> Self {
        Self::monomial(0, p)
    }

    /// `c · ħ^k`.
    pub fn monomial(k: i32, c: LambdaPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Self { terms }
    }

    pub fn hbar_power(k: i32) -> Self {
        Self::monomial(k, LambdaPoly::one())
    }

    pub fn lambda() -> Self {
        Self::monomial(0, LambdaPoly::lambda())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.as_constant().is_some_and(|v| v.is_one()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &LambdaPoly)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, k: i32) -> LambdaPoly {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// True when only `ħ⁰` occurs.
    pub fn is_hbar_free(&self) -> bool {
        self.terms.keys().all(|&k| k == 0)
    }

    pub fn is_lambda_free(&self) -> bool {
        self.terms.values().all(|c| c.degree().unwrap_or(0) == 0)
    }

    /// Rational value when the element is a plain constant.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&0) {
                return c.as_constant();
            }
        }
        None
    }

    pub fn add_term(&mut self, k: i32, c: &LambdaPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v.scale(c))).collect() }
    }

    /// Multiplication by `ħ^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self { terms: self.terms.iter().map(|(e, v)| (e + k, v.clone())).collect() }
    }

    /// The involution `ħ ↦ −ħ`.
    pub fn bar(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (*k, if k % 2 == 0 { v.clone() } else { -v })).collect() }
    }

    /// Splits into the part with `ħ`-exponents `≥ 0` and the part with
    /// exponents `< 0`.
    pub fn split(&self) -> (Self, Self) {
        let mut plus = Self::zero();
        let mut minus = Self::zero();
        for (k, v) in &self.terms {
            if *k >= 0 {
                plus.terms.insert(*k, v.clone());
            } else {
                minus.terms.insert(*k, v.clone());
            }
        }
        (plus, minus)
    }

    /// Keeps only the terms with `ħ`-exponent in `lo..=hi`.
    pub fn window(&self, lo: i32, hi: i32) -> Self {
        Self { terms: self.terms.range(lo..=hi).map(|(k, v)| (*k, v.clone())).collect() }
    }

    /// Substitutes `λ = 0`.
    pub fn at_lambda_zero(&self) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, &LambdaPoly::constant(v.at_zero()));
        }
        out
    }

    /// If this is `c·ħ^k` with a nonzero rational `c`, returns `(k, c)`.
    pub fn as_unit(&self) -> Option<(i32, Rational)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, v) = self.terms.iter().next()?;
        v.as_constant().map(|c| (*k, c))
    }

    /// Inverse of a unit `c·ħ^k`.
    pub fn unit_inverse(&self) -> Option<Self> {
        let (k, c) = self.as_unit()?;
        Some(Self::monomial(-k, LambdaPoly::constant(c.recip())))
    }
}

impl From<Rational> for Laurent {
    fn from(c: Rational) -> Self {
        Self::from_rational(c)
    }
}

impl AddAssign<&Laurent> for Laurent {
    fn add_assign(&mut self, rhs: &Laurent) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, v);
        }
    }
}

impl SubAssign<&Laurent> for Laurent {
    fn sub_assign(&mut self, rhs: &Laurent) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, &-v);
        }
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (i, a) in &self.terms {
            for (j, b) in &rhs.terms {
                out.add_term(i + j, &(a * b));
            }
        }
        out
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        f.write_str("lambda")?;
                    } else {
                        write!(f, "lambda^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Integer linear algebra on small matrices.
pub mod integer {
    use alloc::vec::Vec;

    pub fn gcd(a: i128, b: i128) -> i128 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(rows: &[Vec<i64>]) -> i128 {
        let n = rows.len();
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                    return 0;
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    /// Diagonal of the Smith normal form (nonzero invariant factors only,
    /// nonnegative and in divisibility order).
    pub fn smith_invariants(rows: &[Vec<i64>]) -> Vec<i128> {
        let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let m = a.len();
        let n = a.first().map_or(0, |r| r.len());
        let mut out = Vec::new();
        let mut t = 0;
        while t < m.min(n) {
            // pivot: smallest nonzero absolute value in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            loop {
                let p = a[t][t];
                let mut dirty = false;
                for i in t + 1..m {
                    let q = a[i][t] / p;
                    if q != 0 {
                        for j in t..n {
                            a[i][j] -= q * a[t][j];
                        }
                    }
                    if a[i][t] != 0 {
                        dirty = true;
                    }
                }
                for j in t + 1..n {
                    let q = a[t][j] / p;
                    if q != 0 {
                        for row in a.iter_mut().skip(t) {
                            row[j] -= q * row[t];
                        }
                    }
                    if a[t][j] != 0 {
                        dirty = true;
                    }
                }
                if !dirty {
                    // the pivot must divide the rest of the block
                    let bad = (t + 1..m).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
                    match bad {
                        Some((i, _)) => {
                            for j in t..n {
                                a[t][j] += a[i][j];
                            }
                            continue;
                        }
                        None => break,
                    }
                }
                // move the smallest remaining entry of row/column t to the pivot
                let mut best = (t, t);
                for i in t..m {
                    if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..n {
                    if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
            out.push(a[t][t].abs());
            t += 1;
        }
        out
    }
}

/// Dense rational linear algebra.
pub mod linalg {
    use super::Rational;
    use alloc::vec::Vec;
    use num_traits::{One, Zero};

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(a: &mut [Vec<Rational>]) -> Vec<usize> {
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..rows {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..cols {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(a: &[Vec<Rational>]) -> usize {
        let mut m = a.to_vec();
        rref(&mut m).len()
    }

    /// Solves the square system `a·x = b`; `None` if singular.
    pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
        let n = a.len();
        let mut aug: Vec<Vec<Rational>> = a
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let mut r = row.clone();
                r.push(bi.clone());
                r
            })
            .collect();
        let pivots = rref(&mut aug);
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        debug_assert!(aug.iter().all(|r| r[..n].iter().filter(|x| x.is_one()).count() == 1));
        Some(aug.into_iter().map(|r| r[n].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_bar_and_split() {
        let x = &(&Laurent::from_int(3) + &Laurent::hbar_power(1)) - &Laurent::hbar_power(-1);
        let (p, m) = x.split();
        assert_eq!(p, &Laurent::from_int(3) + &Laurent::hbar_power(1));
        assert_eq!(m, -&Laurent::hbar_power(-1));
        assert_eq!(&p + &m, x);
        let b = x.bar();
        assert_eq!(b.coeff(1), LambdaPoly::constant(rat(-1)));
        assert_eq!(b.coeff(-1), LambdaPoly::constant(rat(1)));
    }

    #[test]
    fn laurent_product_cancels() {
        let a = &Laurent::hbar_power(1) + &Laurent::lambda();
        let b = &Laurent::hbar_power(1) - &Laurent::lambda();
        let p = &a * &b;
        let expected =
            &Laurent::hbar_power(2) - &Laurent::from_lambda_poly(&LambdaPoly::lambda() * &LambdaPoly::lambda());
        assert_eq!(p, expected);
    }

    #[test]
    fn determinant_and_smith() {
        assert_eq!(integer::det(&[vec![1, 0], vec![-1, -1]]), -1);
        assert_eq!(integer::det(&[vec![2, 1, 0], vec![0, 1, 4], vec![1, 0, 1]]), 6);
        assert_eq!(integer::smith_invariants(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(integer::smith_invariants(&[vec![1, 0], vec![1, 0], vec![0, 1], vec![-1, 1]]), vec![1, 1]);
        assert_eq!(integer::smith_invariants(&[vec![2], vec![2]]), vec![2]);
        assert_eq!(integer::smith_invariants(&[vec![4, 6]]), vec![2]);
    }

    #[test]
    fn solve_small_system() {
        let a = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        let x = linalg::solve(&a, &[rat(3), rat(1)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        let singular = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]];
        assert!(linalg::solve(&singular, &[rat(1), rat(1)]).is_none());
    }
}
