//! Canonical text form of series, used for output and golden files.
//!
//! A scalar series is written as a sum of terms `c*h^k*lambda^m*q1^a*q2^b`
//! with exact rational `c`. Terms are ordered by the `q`-exponent (graded,
//! `q1` first), then by increasing power of `h`, then of `lambda`. The zero
//! series is `0`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{LambdaPoly, Laurent, Rational};
use crate::error::{Error, Result};
use crate::series::{Cutoff, Exponent, ScalarSeries};

fn power(name: &str, k: i64) -> String {
    if k == 1 {
        name.to_string()
    } else {
        format!("{name}^{k}")
    }
}

fn push_term(out: &mut String, c: &Rational, factors: &[String]) {
    if out.is_empty() {
        if c.is_negative() {
            out.push('-');
        }
    } else {
        out.push_str(if c.is_negative() { " - " } else { " + " });
    }
    let a = c.abs();
    if factors.is_empty() {
        out.push_str(&a.to_string());
        return;
    }
    if !a.is_one() {
        out.push_str(&a.to_string());
        out.push('*');
    }
    out.push_str(&factors.join("*"));
}

fn laurent_terms(x: &Laurent, q: &[String], out: &mut String) {
    for (k, poly) in x.terms() {
        for (m, c) in poly.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut factors = Vec::new();
            if k != 0 {
                factors.push(power("h", k as i64));
            }
            if m != 0 {
                factors.push(power("lambda", m as i64));
            }
            factors.extend(q.iter().cloned());
            push_term(out, c, &factors);
        }
    }
}

fn q_factors(d: &Exponent) -> Vec<String> {
    d.0.iter().enumerate().filter(|(_, &k)| k > 0).map(|(a, &k)| power(&format!("q{}", a + 1), k as i64)).collect()
}

pub fn render_laurent(x: &Laurent) -> String {
    let mut out = String::new();
    laurent_terms(x, &[], &mut out);
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn render_scalar(s: &ScalarSeries) -> String {
    let mut out = String::new();
    for (d, c) in s.terms() {
        laurent_terms(c, &q_factors(d), &mut out);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::InvalidInput(format!("{what} at offset {}", self.pos))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let text = core::str::from_utf8(&self.s[start..self.pos]).map_err(|_| self.err("bad digits"))?;
        text.parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }

    fn signed_small(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let v: i64 = self.integer()?.try_into().map_err(|_| self.err("exponent too large"))?;
        Ok(if neg { -v } else { v })
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a variable"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }
}

/// Parses the canonical form back into a series truncated to `cutoff`.
pub fn parse_scalar(text: &str, cutoff: &Cutoff) -> Result<ScalarSeries> {
    let r = cutoff.rank();
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let mut out = ScalarSeries::new(cutoff.clone());
    let mut sign = Rational::one();
    if p.peek() == Some(b'-') {
        p.pos += 1;
        sign = -sign;
    }
    loop {
        let mut coeff = sign.clone();
        let mut hbar = 0i32;
        let mut lambda = 0usize;
        let mut d = Exponent::zero(r);
        loop {
            match p.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num = p.integer()?;
                    let mut value = Rational::from_integer(num);
                    if p.peek() == Some(b'/') {
                        p.pos += 1;
                        let den = p.integer()?;
                        if den.is_zero() {
                            return Err(p.err("zero denominator"));
                        }
                        value /= Rational::from_integer(den);
                    }
                    coeff *= value;
                }
                Some(_) => {
                    let name = p.ident()?;
                    let k = if p.peek() == Some(b'^') {
                        p.pos += 1;
                        p.signed_small()?
                    } else {
                        1
                    };
                    match name.as_str() {
                        "h" => hbar += k as i32,
                        "lambda" if k >= 0 => lambda += k as usize,
                        q if q.starts_with('q') => {
                            let a: usize = q[1..].parse().map_err(|_| p.err("bad variable"))?;
                            if a == 0 || a > r || k < 0 {
                                return Err(p.err("variable out of range"));
                            }
                            d.0[a - 1] += k as u32;
                        }
                        _ => return Err(p.err("unknown variable")),
                    }
                }
                None => return Err(p.err("unexpected end")),
            }
            if p.peek() == Some(b'*') {
                p.pos += 1;
            } else {
                break;
            }
        }
        let mut lp = alloc::vec![Rational::zero(); lambda + 1];
        lp[lambda] = coeff;
        out.add_term(d, Laurent::monomial(hbar, LambdaPoly::from_coeffs(lp)));
        match p.peek() {
            None => break,
            Some(b'+') => sign = Rational::one(),
            Some(b'-') => sign = -Rational::one(),
            Some(_) => return Err(p.err("expected + or -")),
        }
        p.pos += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    #[test]
    fn renders_in_canonical_order() {
        let cut = Cutoff::new(alloc::vec![2, 2]);
        let mut s = ScalarSeries::new(cut.clone());
        s.add_term(Exponent(alloc::vec![1, 1]), Laurent::from_int(-2));
        s.add_term(Exponent(alloc::vec![0, 1]), Laurent::monomial(-1, LambdaPoly::constant(ratio(1, 2))));
        s.add_term(Exponent(alloc::vec![0, 0]), Laurent::one());
        assert_eq!(render_scalar(&s), "1 + 1/2*h^-1*q2 - 2*q1*q2");
        assert_eq!(parse_scalar(&render_scalar(&s), &cut).unwrap(), s);
    }

    #[test]
    fn parses_lambda_terms() {
        let cut = Cutoff::new(alloc::vec![1]);
        let s = parse_scalar("-lambda^2*h + 3/4*q1", &cut).unwrap();
        let lam2 = LambdaPoly::from_coeffs(alloc::vec![rat(0), rat(0), rat(-1)]);
        assert_eq!(s.get(&Exponent(alloc::vec![0])), Some(&Laurent::monomial(1, lam2)));
        assert_eq!(render_scalar(&s), "-h*lambda^2 + 3/4*q1");
        assert_eq!(render_scalar(&ScalarSeries::new(cut)), "0");
    }
}
