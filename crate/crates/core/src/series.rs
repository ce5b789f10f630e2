//! Truncated power series in the Kähler variables `q^1..q^r` with
//! coefficients in `ℚ[λ][ħ, ħ⁻¹]`, plus matrix and class-vector variants.
//!
//! A series lives in the quotient `ℚ[[q]]/(q_a^{c_a+1})` fixed by its
//! [`Cutoff`]; every operation in this module is exact in that quotient.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::arith::{rat, LambdaPoly, Laurent, Rational};
use crate::error::{Error, Result};

/// Multi-index `d ∈ ℕʳ` of a monomial `q^d`.
///
/// Ordered by total degree, then lexicographically with `q¹` largest, so
/// that `(1,0)` comes before `(0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn zero(r: usize) -> Self {
        Self(vec![0; r])
    }

    pub fn unit(r: usize, a: usize) -> Self {
        let mut v = vec![0; r];
        v[a] = 1;
        Self(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other` if it stays in `ℕʳ`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<_>>().map(Self)
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&x| x as i64).collect()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Per-variable truncation orders: `q^d` is kept iff `d_a ≤ c_a` for all `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cutoff(Vec<u32>);

impl Cutoff {
    pub fn new(orders: Vec<u32>) -> Self {
        Self(orders)
    }

    pub fn uniform(r: usize, c: u32) -> Self {
        Self(vec![c; r])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn orders(&self) -> &[u32] {
        &self.0
    }

    pub fn contains(&self, d: &Exponent) -> bool {
        d.0.len() == self.0.len() && d.0.iter().zip(&self.0).all(|(x, c)| x <= c)
    }

    /// Componentwise minimum of two cutoffs.
    pub fn meet(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// All exponents in the box, in increasing order.
    pub fn exponents(&self) -> Vec<Exponent> {
        let mut out = vec![Exponent::zero(self.rank())];
        for (a, &c) in self.0.iter().enumerate() {
            let prev = core::mem::take(&mut out);
            for d in prev {
                for k in 0..=c {
                    let mut e = d.clone();
                    e.0[a] = k;
                    out.push(e);
                }
            }
        }
        out.sort();
        out
    }
}

/// Operations a series coefficient must support.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn vanishes(&self) -> bool;
    fn accumulate(&mut self, other: &Self);
    fn negated(&self) -> Self;
    fn scaled(&self, c: &Rational) -> Self;
    fn times_scalar(&self, s: &Laurent) -> Self;
}

/// Coefficients that can be split into nonnegative and negative `ħ`-parts
/// and conjugated by `ħ ↦ −ħ`.
pub trait HbarGraded: Coefficient {
    fn split_hbar(&self) -> (Self, Self);
    fn bar(&self) -> Self;
    /// Every `ħ`-exponent that occurs.
    fn hbar_exponents(&self) -> Vec<i32>;
}

impl Coefficient for Laurent {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.scale(c)
    }
    fn times_scalar(&self, s: &Laurent) -> Self {
        self * s
    }
}

impl HbarGraded for Laurent {
    fn split_hbar(&self) -> (Self, Self) {
        self.split()
    }
    fn bar(&self) -> Self {
        Laurent::bar(self)
    }
    fn hbar_exponents(&self) -> Vec<i32> {
        self.terms().map(|(k, _)| k).collect()
    }
}

/// Square matrix over `ℚ[λ][ħ, ħ⁻¹]`, stored row-major.
///
/// Column `j` is the image of the basis vector `T_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LMatrix {
    n: usize,
    entries: Vec<Laurent>,
}

impl LMatrix {
    pub fn zero(n: usize) -> Self {
        Self { n, entries: vec![Laurent::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, Laurent::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Laurent>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { n, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_rational(rows: &[Vec<Rational>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|x| Laurent::from_rational(x.clone())).collect()).collect())
    }

    pub fn from_columns(cols: &[HLaurent]) -> Self {
        let n = cols.len();
        let mut m = Self::zero(n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, c.get(i).clone());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Laurent {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Laurent) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut Laurent {
        &mut self.entries[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> HLaurent {
        HLaurent::from_comps((0..self.n).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Laurent::is_zero)
    }

    pub fn is_hbar_free(&self) -> bool {
        self.entries.iter().all(Laurent::is_hbar_free)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        *out.entry_mut(i, j) += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &HLaurent) -> HLaurent {
        let mut out = HLaurent::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self.get(i, j);
                let b = v.get(j);
                if !a.is_zero() && !b.is_zero() {
                    *out.get_mut(i) += &(a * b);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.accumulate(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.negated())
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Laurent) -> Laurent) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    /// Inverse by Gauss–Jordan elimination. Pivots must be units `c·ħ^k`.
    pub fn invert(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| a.get(r, col).as_unit().is_some());
            let Some(p) = pivot_row else {
                return Err(if (col..n).all(|r| a.get(r, col).is_zero()) {
                    Error::SingularConstantTerm
                } else {
                    Error::ZeroDivisor
                });
            };
            a.swap_rows(col, p);
            inv.swap_rows(col, p);
            let pinv = a.get(col, col).unit_inverse().expect("pivot is a unit");
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                a.eliminate(r, col, &f);
                inv.eliminate(r, col, &f);
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for k in 0..self.n {
                self.entries.swap(i * self.n + k, j * self.n + k);
            }
        }
    }

    fn scale_row(&mut self, i: usize, f: &Laurent) {
        for k in 0..self.n {
            let v = self.get(i, k) * f;
            self.set(i, k, v);
        }
    }

    /// `row_r −= f · row_s`.
    fn eliminate(&mut self, r: usize, s: usize, f: &Laurent) {
        for k in 0..self.n {
            let t = f * self.get(s, k);
            *self.entry_mut(r, k) -= &t;
        }
    }
}

impl Coefficient for LMatrix {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn accumulate(&mut self, other: &Self) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
    }
    fn negated(&self) -> Self {
        self.map(|x| -x)
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.map(|x| x.scale(c))
    }
    fn times_scalar(&self, s: &Laurent) -> Self {
        self.map(|x| x * s)
    }
}

impl HbarGraded for LMatrix {
    fn split_hbar(&self) -> (Self, Self) {
        let plus = self.map(|x| x.split().0);
        let minus = self.map(|x| x.split().1);
        (plus, minus)
    }
    fn bar(&self) -> Self {
        self.map(Laurent::bar)
    }
    fn hbar_exponents(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.entries.iter().flat_map(|e| e.hbar_exponents()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Cohomology class with coefficients in `ℚ[λ][ħ, ħ⁻¹]`, stored as one
/// Laurent polynomial per basis element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HLaurent {
    comps: Vec<Laurent>,
}

impl HLaurent {
    pub fn zero(dim: usize) -> Self {
        Self { comps: vec![Laurent::zero(); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.comps[i] = Laurent::one();
        v
    }

    pub fn from_comps(comps: Vec<Laurent>) -> Self {
        Self { comps }
    }

    pub fn from_class(class: &[LambdaPoly]) -> Self {
        Self { comps: class.iter().map(|c| Laurent::from_lambda_poly(c.clone())).collect() }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Laurent] {
        &self.comps
    }

    pub fn get(&self, i: usize) -> &Laurent {
        &self.comps[i]
    }

    pub fn get_mut(&mut self, i: usize) -> &mut Laurent {
        &mut self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Laurent::is_zero)
    }

    /// The class multiplying `ħ^k`.
    pub fn hbar_coefficient(&self, k: i32) -> Vec<LambdaPoly> {
        self.comps.iter().map(|c| c.coeff(k)).collect()
    }

    pub fn map(&self, f: impl Fn(&Laurent) -> Laurent) -> Self {
        Self { comps: self.comps.iter().map(f).collect() }
    }
}

impl Coefficient for HLaurent {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn accumulate(&mut self, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            *a += b;
        }
    }
    fn negated(&self) -> Self {
        self.map(|x| -x)
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.map(|x| x.scale(c))
    }
    fn times_scalar(&self, s: &Laurent) -> Self {
        self.map(|x| x * s)
    }
}

impl HbarGraded for HLaurent {
    fn split_hbar(&self) -> (Self, Self) {
        (self.map(|x| x.split().0), self.map(|x| x.split().1))
    }
    fn bar(&self) -> Self {
        self.map(Laurent::bar)
    }
    fn hbar_exponents(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.comps.iter().flat_map(|e| e.hbar_exponents()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Truncated power series `Σ_d c_d q^d`. Zero coefficients are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries<C> {
    cutoff: Cutoff,
    terms: BTreeMap<Exponent, C>,
}

pub type ScalarSeries = QSeries<Laurent>;
pub type MatrixSeries = QSeries<LMatrix>;
pub type VectorSeries = QSeries<HLaurent>;

impl<C: Coefficient> QSeries<C> {
    pub fn new(cutoff: Cutoff) -> Self {
        Self { cutoff, terms: BTreeMap::new() }
    }

    pub fn constant(cutoff: Cutoff, c: C) -> Self {
        let d = Exponent::zero(cutoff.rank());
        Self::monomial(cutoff, d, c)
    }

    pub fn monomial(cutoff: Cutoff, d: Exponent, c: C) -> Self {
        let mut s = Self::new(cutoff);
        s.add_term(d, c);
        s
    }

    pub fn from_terms(cutoff: Cutoff, terms: impl IntoIterator<Item = (Exponent, C)>) -> Self {
        let mut s = Self::new(cutoff);
        for (d, c) in terms {
            s.add_term(d, c);
        }
        s
    }

    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }

    pub fn rank(&self) -> usize {
        self.cutoff.rank()
    }

    pub fn get(&self, d: &Exponent) -> Option<&C> {
        self.terms.get(d)
    }

    pub fn constant_term(&self) -> Option<&C> {
        self.terms.get(&Exponent::zero(self.rank()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·q^d`; terms outside the box are dropped.
    pub fn add_term(&mut self, d: Exponent, c: C) {
        if !self.cutoff.contains(&d) || c.vanishes() {
            return;
        }
        match self.terms.entry(d) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().accumulate(&c);
                if o.get().vanishes() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.negated())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|x| x.scaled(c))
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> QSeries<D> {
        QSeries::from_terms(self.cutoff.clone(), self.terms.iter().map(|(d, c)| (d.clone(), f(c))))
    }

    /// `q^a ∂/∂q^a`.
    pub fn log_derivative(&self, a: usize) -> Self {
        QSeries::from_terms(
            self.cutoff.clone(),
            self.terms.iter().map(|(d, c)| (d.clone(), c.scaled(&rat(d.0[a] as i64)))),
        )
    }

    /// Multiplication by `q^e`, truncated to the box.
    pub fn shift(&self, e: &Exponent) -> Self {
        QSeries::from_terms(self.cutoff.clone(), self.terms.iter().map(|(d, c)| (d.add(e), c.clone())))
    }

    /// Keeps the terms whose exponent satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&Exponent) -> bool) -> Self {
        Self {
            cutoff: self.cutoff.clone(),
            terms: self.terms.iter().filter(|(d, _)| keep(d)).map(|(d, c)| (d.clone(), c.clone())).collect(),
        }
    }

    /// Re-truncates to a smaller box.
    pub fn truncate(&self, cutoff: &Cutoff) -> Self {
        QSeries::from_terms(cutoff.clone(), self.terms.iter().map(|(d, c)| (d.clone(), c.clone())))
    }

    /// Cauchy product with coefficientwise multiplication `f`.
    pub fn mul_with<D: Coefficient, E: Coefficient>(&self, other: &QSeries<D>, f: impl Fn(&C, &D) -> E) -> QSeries<E> {
        let cutoff = self.cutoff.meet(&other.cutoff);
        let mut out = QSeries::new(cutoff.clone());
        for (d1, a) in &self.terms {
            for (d2, b) in &other.terms {
                let d = d1.add(d2);
                if cutoff.contains(&d) {
                    out.add_term(d, f(a, b));
                }
            }
        }
        out
    }

    /// Multiplication by a scalar series.
    pub fn times_scalar_series(&self, s: &ScalarSeries) -> Self {
        self.mul_with(s, |c, x| c.times_scalar(x))
    }
}

impl<C: HbarGraded> QSeries<C> {
    /// Splits into the parts with nonnegative and negative `ħ`-exponents.
    pub fn split_hbar(&self) -> (Self, Self) {
        let mut plus = Self::new(self.cutoff.clone());
        let mut minus = Self::new(self.cutoff.clone());
        for (d, c) in &self.terms {
            let (p, m) = c.split_hbar();
            plus.add_term(d.clone(), p);
            minus.add_term(d.clone(), m);
        }
        (plus, minus)
    }

    pub fn bar(&self) -> Self {
        self.map(|c| c.bar())
    }

    /// Every `ħ`-exponent that occurs in some coefficient.
    pub fn hbar_exponents(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.terms.values().flat_map(|c| c.hbar_exponents()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Splits a coefficient or series into its `ħ ≥ 0` and `ħ < 0` parts.
pub fn split_hbar<C: HbarGraded>(s: &QSeries<C>) -> (QSeries<C>, QSeries<C>) {
    s.split_hbar()
}

impl ScalarSeries {
    pub fn one(cutoff: Cutoff) -> Self {
        Self::constant(cutoff, Laurent::one())
    }

    /// The coordinate `q^a`.
    pub fn variable(cutoff: Cutoff, a: usize) -> Self {
        let r = cutoff.rank();
        Self::monomial(cutoff, Exponent::unit(r, a), Laurent::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_with(other, |a, b| a * b)
    }

    /// Multiplication by `ħ^k`.
    pub fn hbar_shift(&self, k: i32) -> Self {
        self.map(|c| c.shift(k))
    }

    /// `exp(self)` for a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        if self.constant_term().is_some() {
            return Err(Error::InvalidInput("exponential of a series with a constant term".into()));
        }
        let mut out = Self::one(self.cutoff.clone());
        let mut power = out.clone();
        let mut k = 1i64;
        loop {
            power = power.mul(self).scale(&Rational::new(1.into(), k.into()));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
            k += 1;
        }
        Ok(out)
    }

    /// Power-series inverse; the constant term must be a unit `c·ħ^k`.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term().ok_or(Error::SingularConstantTerm)?;
        let inv0 = c0.unit_inverse().ok_or(Error::ZeroDivisor)?;
        let rest = self.restrict(|d| !d.is_zero());
        let mut out = Self::new(self.cutoff.clone());
        for d in self.cutoff.exponents() {
            let mut acc = if d.is_zero() { Laurent::one() } else { Laurent::zero() };
            for (d1, a) in rest.terms() {
                if let Some(d2) = d.checked_sub(d1) {
                    if let Some(b) = out.get(&d2) {
                        acc -= &(a * b);
                    }
                }
            }
            out.add_term(d, &inv0 * &acc);
        }
        Ok(out)
    }
}

impl MatrixSeries {
    pub fn identity(cutoff: Cutoff, n: usize) -> Self {
        Self::constant(cutoff, LMatrix::identity(n))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_with(other, LMatrix::mul)
    }

    pub fn apply(&self, v: &VectorSeries) -> VectorSeries {
        self.mul_with(v, LMatrix::apply)
    }

    pub fn left_mul_const(&self, m: &LMatrix) -> Self {
        self.map(|c| m.mul(c))
    }

    pub fn right_mul_const(&self, m: &LMatrix) -> Self {
        self.map(|c| c.mul(m))
    }

    pub fn transpose(&self) -> Self {
        self.map(LMatrix::transpose)
    }

    /// The `(i, j)` entry as a scalar series.
    pub fn entry(&self, i: usize, j: usize) -> ScalarSeries {
        QSeries::from_terms(self.cutoff.clone(), self.terms.iter().map(|(d, m)| (d.clone(), m.get(i, j).clone())))
    }

    pub fn column(&self, j: usize) -> VectorSeries {
        self.map(|m| m.column(j))
    }

    /// Builds a matrix series from its scalar entries `entries[i][j]`.
    pub fn from_entries(cutoff: Cutoff, entries: &[Vec<ScalarSeries>]) -> Self {
        let n = entries.len();
        let mut out = Self::new(cutoff.clone());
        for d in cutoff.exponents() {
            let mut m = LMatrix::zero(n);
            for (i, row) in entries.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    if let Some(c) = e.get(&d) {
                        m.set(i, j, c.clone());
                    }
                }
            }
            out.add_term(d, m);
        }
        out
    }

    /// Inverse; the constant term must be invertible with unit pivots.
    pub fn invert(&self, n: usize) -> Result<Self> {
        let c0 = self.constant_term().ok_or(Error::SingularConstantTerm)?;
        let inv0 = c0.invert()?;
        let rest = self.restrict(|d| !d.is_zero());
        let mut out = Self::new(self.cutoff.clone());
        for d in self.cutoff.exponents() {
            if d.is_zero() {
                out.add_term(d, inv0.clone());
                continue;
            }
            let mut acc = LMatrix::zero(n);
            for (d1, a) in rest.terms() {
                if let Some(d2) = d.checked_sub(d1) {
                    if let Some(b) = out.get(&d2) {
                        acc.accumulate(&a.mul(b));
                    }
                }
            }
            out.add_term(d, inv0.mul(&acc).negated());
        }
        Ok(out)
    }

    /// `exp(self)` for a series without constant term.
    pub fn exp(&self, n: usize) -> Result<Self> {
        if self.constant_term().is_some() {
            return Err(Error::InvalidInput("exponential of a series with a constant term".into()));
        }
        let mut out = Self::identity(self.cutoff.clone(), n);
        let mut power = out.clone();
        let mut k = 1i64;
        loop {
            power = power.mul(self).scale(&Rational::new(1.into(), k.into()));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
            k += 1;
        }
        Ok(out)
    }
}

impl VectorSeries {
    pub fn component(&self, i: usize) -> ScalarSeries {
        QSeries::from_terms(self.cutoff.clone(), self.terms.iter().map(|(d, v)| (d.clone(), v.get(i).clone())))
    }
}

/// Recovers `f` with `f(0) = 0` from its logarithmic derivatives
/// `g_a = q^a ∂_a f`, checking that the data are compatible.
pub fn log_integrate(g: &[ScalarSeries]) -> Result<ScalarSeries> {
    let cutoff = g.first().map(|s| s.cutoff().clone()).ok_or_else(|| Error::InvalidInput("no derivatives".into()))?;
    if g.len() != cutoff.rank() {
        return Err(Error::DimensionMismatch("one derivative per variable required".into()));
    }
    for (a, ga) in g.iter().enumerate() {
        if ga.constant_term().is_some() {
            return Err(Error::NonzeroConstant(a));
        }
    }
    let mut out = ScalarSeries::new(cutoff.clone());
    let zero = Laurent::zero();
    for d in cutoff.exponents() {
        if d.is_zero() {
            continue;
        }
        let a = d.0.iter().position(|&x| x != 0).expect("nonzero exponent");
        let ga = g[a].get(&d).unwrap_or(&zero);
        for b in 0..g.len() {
            let gb = g[b].get(&d).unwrap_or(&zero);
            if ga.scale(&rat(d.0[b] as i64)) != gb.scale(&rat(d.0[a] as i64)) {
                return Err(Error::Inconsistent { d: d.clone(), a, b });
            }
        }
        out.add_term(d.clone(), ga.scale(&rat(d.0[a] as i64).recip()));
    }
    Ok(out)
}

/// Rewrites a series in `q` in the coordinates `q̂` given by
/// `q^a = q̂^a · exp(δ^a(q̂))`. Each `δ^a` must have zero constant term.
pub fn substitute<C: Coefficient>(s: &QSeries<C>, delta: &[ScalarSeries]) -> Result<QSeries<C>> {
    let cutoff = s.cutoff().clone();
    let r = cutoff.rank();
    if delta.len() != r {
        return Err(Error::DimensionMismatch("one shift per variable required".into()));
    }
    // powers[a][k] = exp(k δ^a)
    let mut powers: Vec<Vec<ScalarSeries>> = Vec::with_capacity(r);
    for (a, da) in delta.iter().enumerate() {
        let e = da.truncate(&cutoff).exp()?;
        let mut row = vec![ScalarSeries::one(cutoff.clone())];
        for k in 1..=cutoff.orders()[a] as usize {
            let next = row[k - 1].mul(&e);
            row.push(next);
        }
        powers.push(row);
    }
    let mut out = QSeries::new(cutoff.clone());
    let mut cache: BTreeMap<Exponent, ScalarSeries> = BTreeMap::new();
    for (d, c) in s.terms() {
        let factor = cache
            .entry(d.clone())
            .or_insert_with(|| {
                let mut f = ScalarSeries::one(cutoff.clone());
                for a in 0..r {
                    let k = d.0[a] as usize;
                    if k > 0 {
                        f = f.mul(&powers[a][k]);
                    }
                }
                f.shift(d)
            })
            .clone();
        for (e, x) in factor.terms() {
            out.add_term(e.clone(), c.times_scalar(x));
        }
    }
    Ok(out)
}

/// Given `q̂^a = q^a · exp(ε^a(q))`, returns `δ` with `q^a = q̂^a · exp(δ^a(q̂))`.
pub fn reverse_coordinates(eps: &[ScalarSeries]) -> Result<Vec<ScalarSeries>> {
    let cutoff = eps.first().map(|s| s.cutoff().clone()).ok_or_else(|| Error::InvalidInput("no coordinates".into()))?;
    for (a, e) in eps.iter().enumerate() {
        if e.constant_term().is_some() {
            return Err(Error::NonzeroConstant(a));
        }
    }
    let mut delta: Vec<ScalarSeries> = eps.iter().map(|_| ScalarSeries::new(cutoff.clone())).collect();
    let rounds = cutoff.orders().iter().sum::<u32>() + 1;
    for _ in 0..rounds {
        let next: Vec<ScalarSeries> =
            eps.iter().map(|e| substitute(e, &delta).map(|s| s.neg())).collect::<Result<_>>()?;
        if next == delta {
            break;
        }
        delta = next;
    }
    Ok(delta)
}

/// `(u + cħ)⁻¹ = Σ_k (−1)^k u^k (cħ)^{−k−1}` applied through a nilpotent
/// multiplication operator `mul_u`; `c` must be nonzero.
pub fn inv_linear(one: &HLaurent, mul_u: impl Fn(&HLaurent) -> HLaurent, c: &Rational) -> HLaurent {
    let mut out = HLaurent::zero(one.dim());
    let mut power = one.clone();
    let mut k = 0i32;
    let cinv = c.recip();
    let mut factor = cinv.clone();
    while !power.is_zero() {
        let sign = if k % 2 == 0 { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
        let term = power.map(|x| x.shift(-k - 1).scale(&(&sign * &factor)));
        out.accumulate(&term);
        power = mul_u(&power);
        factor *= &cinv;
        k += 1;
    }
    out
}

/// Checks the `ħ`-exponent bound used to detect runaway expansions.
pub fn check_hbar_bound<C: HbarGraded>(s: &QSeries<C>, bound: i64) -> Result<()> {
    let exps = s.hbar_exponents();
    if exps.iter().any(|&k| (k as i64).abs() > bound) {
        return Err(Error::RunawayExpansion);
    }
    Ok(())
}
