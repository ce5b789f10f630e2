//! Homogeneity checks for the grading `deg ħ = deg λ = 2`,
//! `deg T_i = 2|T_i|` and `deg q^a = 2(Σ_i m_i^a − Σ_j l_j^a)`.

use alloc::vec::Vec;

use crate::arith::Laurent;
use crate::ring::CohomologyRing;
use crate::series::{Exponent, MatrixSeries, ScalarSeries, VectorSeries};
use crate::toric::ToricSuperspace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    basis: Vec<i64>,
    deg_q: Vec<i64>,
}

impl Grading {
    pub fn new(space: &ToricSuperspace, ring: &CohomologyRing) -> Self {
        Self { basis: ring.basis_degrees(), deg_q: space.degree_vector() }
    }

    pub fn basis_degrees(&self) -> &[i64] {
        &self.basis
    }

    pub fn q_degrees(&self) -> &[i64] {
        &self.deg_q
    }

    fn q_degree(&self, d: &Exponent) -> i64 {
        d.0.iter().zip(&self.deg_q).map(|(&k, &g)| k as i64 * g).sum()
    }

    fn laurent_homogeneous(&self, x: &Laurent, d: &Exponent, target: i64) -> bool {
        let qd = self.q_degree(d);
        x.terms().all(|(k, poly)| {
            poly.coeffs()
                .iter()
                .enumerate()
                .all(|(m, c)| num_traits::Zero::is_zero(c) || 2 * k as i64 + 2 * m as i64 + qd == target)
        })
    }

    /// Checks an operator of the given degree: the entry `(i, j)` at `q^d`
    /// has degree `deg T_j − deg T_i + op_degree`. Returns the first
    /// offending exponent.
    pub fn check_matrix(&self, m: &MatrixSeries, op_degree: i64) -> Result<(), Exponent> {
        let n = self.basis.len();
        for (d, c) in m.terms() {
            for i in 0..n {
                for j in 0..n {
                    let target = self.basis[j] - self.basis[i] + op_degree;
                    if !self.laurent_homogeneous(c.get(i, j), d, target) {
                        return Err(d.clone());
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks a vector of total degree `degree`: component `i` has degree
    /// `degree − deg T_i`.
    pub fn check_vector(&self, v: &VectorSeries, degree: i64) -> Result<(), Exponent> {
        for (d, c) in v.terms() {
            for (i, x) in c.comps().iter().enumerate() {
                if !self.laurent_homogeneous(x, d, degree - self.basis[i]) {
                    return Err(d.clone());
                }
            }
        }
        Ok(())
    }

    pub fn check_scalar(&self, s: &ScalarSeries, degree: i64) -> Result<(), Exponent> {
        for (d, c) in s.terms() {
            if !self.laurent_homogeneous(c, d, degree) {
                return Err(d.clone());
            }
        }
        Ok(())
    }
}
