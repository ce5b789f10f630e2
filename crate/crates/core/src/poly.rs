//! Sparse multivariate polynomials with rational coefficients.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{One, Signed, Zero};

use crate::arith::Rational;

/// Polynomial in `nvars` commuting variables. Exponent vectors with zero
/// coefficient are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn monomial(exps: Vec<u32>, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exps.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, a) in &self.terms {
            for (e2, b) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.add_term(e, a * b);
            }
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Evaluates with `vars[i]` substituted for variable `i`, inside any
    /// commutative algebra described by the closures.
    pub fn eval<R: Clone>(
        &self,
        vars: &[R],
        one: &R,
        mul: impl Fn(&R, &R) -> R,
        scale: impl Fn(&R, &Rational) -> R,
        add: impl Fn(&R, &R) -> R,
    ) -> R {
        let mut powers: Vec<Vec<R>> = vars.iter().map(|v| vec![one.clone(), v.clone()]).collect();
        let mut acc: Option<R> = None;
        for (e, c) in &self.terms {
            let mut m = one.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = mul(powers[i].last().expect("nonempty"), &vars[i]);
                    powers[i].push(next);
                }
                m = mul(&m, &powers[i][k as usize]);
            }
            let t = scale(&m, c);
            acc = Some(match acc {
                None => t,
                Some(a) => add(&a, &t),
            });
        }
        acc.unwrap_or_else(|| scale(one, &Rational::zero()))
    }

    /// Human-readable form using the given variable names.
    pub fn render(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let mut s = String::new();
        for (idx, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            if idx == 0 {
                if c.is_negative() {
                    s.push('-');
                }
            } else {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let a = c.abs();
            let mut factors: Vec<String> = Vec::new();
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(names[i].into()),
                    _ => {
                        let mut f = String::new();
                        let _ = write!(f, "{}^{}", names[i], k);
                        factors.push(f);
                    }
                }
            }
            if factors.is_empty() {
                let _ = write!(s, "{a}");
            } else {
                if !a.is_one() {
                    let _ = write!(s, "{a}*");
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }
}
