//! Abstract quantum D-module operations: the connection of a frame,
//! flatness, Birkhoff factorization, gauge fixing to the canonical frame
//! and the recursive reconstruction of the flat section.

use alloc::vec::Vec;

use crate::arith::{rat, Laurent};
use crate::error::{Error, Result};
use crate::ring::CohomologyRing;
use crate::series::{Coefficient, Cutoff, Exponent, LMatrix, MatrixSeries};

/// Connection matrices `Ω_a`, one per Kähler variable, for the connection
/// `∇_a = q^a∂_a + ħ⁻¹Ω_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionSet {
    pub omegas: Vec<MatrixSeries>,
}

impl ConnectionSet {
    pub fn rank(&self) -> usize {
        self.omegas.len()
    }

    pub fn get(&self, a: usize) -> &MatrixSeries {
        &self.omegas[a]
    }

    pub fn cutoff(&self) -> &Cutoff {
        self.omegas[0].cutoff()
    }

    /// True when no `ħ` occurs in any matrix.
    pub fn hbar_free(&self) -> bool {
        self.omegas.iter().all(|m| m.terms().all(|(_, c)| c.is_hbar_free()))
    }

    /// `ħ(q^a∂_aΩ_b − q^b∂_bΩ_a) + [Ω_a, Ω_b]` for every pair `a < b`.
    pub fn flatness_residuals(&self) -> Vec<((usize, usize), MatrixSeries)> {
        let mut out = Vec::new();
        for a in 0..self.rank() {
            for b in a + 1..self.rank() {
                let (oa, ob) = (&self.omegas[a], &self.omegas[b]);
                let deriv = ob.log_derivative(a).sub(&oa.log_derivative(b)).map(|m| m.map(|x| x.shift(1)));
                let comm = oa.mul(ob).sub(&ob.mul(oa));
                out.push(((a, b), deriv.add(&comm)));
            }
        }
        out
    }

    pub fn is_flat(&self) -> bool {
        self.flatness_residuals().iter().all(|(_, r)| r.is_zero())
    }
}

/// `S = S₊ S₋` with `S₊` in nonnegative and `S₋ − I` in negative powers of
/// `ħ`, both equal to the identity at `q = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirkhoffPair {
    pub plus: MatrixSeries,
    pub minus: MatrixSeries,
}

/// `Ω_a = S(ħ q^a∂_a S⁻¹ + p_a S⁻¹)`, the connection of the frame whose
/// solution matrix is `S⁻¹`.
pub fn connection_from_parts(s: &MatrixSeries, s_inv: &MatrixSeries, ring: &CohomologyRing) -> ConnectionSet {
    let omegas = (0..ring.rank())
        .map(|a| {
            let deriv = s_inv.log_derivative(a).map(|m| m.map(|x| x.shift(1)));
            let cup = s_inv.left_mul_const(&ring.cup_matrix(a));
            s.mul(&deriv.add(&cup))
        })
        .collect();
    ConnectionSet { omegas }
}

/// Inverts `S⁻¹` and returns the connection together with `S`.
pub fn connection_from_s(s_inv: &MatrixSeries, ring: &CohomologyRing) -> Result<(ConnectionSet, MatrixSeries)> {
    let s = s_inv.invert(ring.dim())?;
    let conn = connection_from_parts(&s, s_inv, ring);
    for a in 0..conn.rank() {
        let c0 = conn.omegas[a].constant_term().cloned().unwrap_or_else(|| LMatrix::zero(ring.dim()));
        if c0 != ring.cup_matrix(a) {
            return Err(Error::DimensionMismatch("connection does not reduce to cup product at q = 0".into()));
        }
    }
    Ok((conn, s))
}

/// Birkhoff factorization, computed degree by degree in `q`:
/// `S_d = Σ_{d₁+d₂=d} A_{d₁} B_{d₂}` with `A` in `ħ ≥ 0` and `B` in `ħ < 0`.
pub fn birkhoff_factorize(s: &MatrixSeries, n: usize) -> Result<BirkhoffPair> {
    let cutoff = s.cutoff().clone();
    let zero = Exponent::zero(cutoff.rank());
    match s.constant_term() {
        Some(c) if *c == LMatrix::identity(n) => {}
        _ => return Err(Error::SingularConstantTerm),
    }
    let mut plus = MatrixSeries::identity(cutoff.clone(), n);
    let mut minus = MatrixSeries::identity(cutoff.clone(), n);
    for d in cutoff.exponents() {
        if d == zero {
            continue;
        }
        let mut r = s.get(&d).cloned().unwrap_or_else(|| LMatrix::zero(n));
        for (d1, a) in plus.terms() {
            if d1.is_zero() || *d1 == d {
                continue;
            }
            if let Some(d2) = d.checked_sub(d1) {
                if let Some(b) = minus.get(&d2) {
                    r = r.sub(&a.mul(b));
                }
            }
        }
        let (p, m) = crate::series::HbarGraded::split_hbar(&r);
        plus.add_term(d.clone(), p);
        minus.add_term(d, m);
    }
    Ok(BirkhoffPair { plus, minus })
}

/// Gauge transform by `S₊`: `Ω̂_a = S₊⁻¹(Ω_a S₊ + ħ q^a∂_a S₊)`, which must
/// be free of `ħ`.
pub fn canonical_connection(conn: &ConnectionSet, pair: &BirkhoffPair, n: usize) -> Result<ConnectionSet> {
    let plus_inv = pair.plus.invert(n)?;
    let mut omegas = Vec::with_capacity(conn.rank());
    for (a, om) in conn.omegas.iter().enumerate() {
        let deriv = pair.plus.log_derivative(a).map(|m| m.map(|x| x.shift(1)));
        let hat = plus_inv.mul(&om.mul(&pair.plus).add(&deriv));
        if let Some((d, _)) = hat.terms().find(|(_, m)| !m.is_hbar_free()) {
            return Err(Error::ResidualHbar { a, d: d.clone() });
        }
        omegas.push(hat);
    }
    Ok(ConnectionSet { omegas })
}

/// `(n + ħ⁻¹ ad P)⁻¹ X = n⁻¹ Σ_j (−ad P/(nħ))^j X`; the sum terminates
/// because `ad P` is nilpotent.
fn solve_ad(order: u32, p: &LMatrix, rhs: &LMatrix) -> LMatrix {
    let inv_n = rat(order as i64).recip();
    let mut x = rhs.scaled(&inv_n);
    let mut acc = x.clone();
    let factor = Laurent::hbar_power(-1).scale(&(-inv_n));
    loop {
        x = p.commutator(&x).times_scalar(&factor);
        if x.is_zero() {
            break;
        }
        acc.accumulate(&x);
    }
    acc
}

/// Rebuilds the flat section `S` with `S(0) = I` from a connection whose
/// constant terms are the cup products, one Kähler variable at a time.
///
/// Writing `S(k)` for the solution restricted to `q^{k+1} = … = q^r = 0`,
/// `S(k+1) = S(k) Σ_n T_n (q^{k+1})^n` where `T_0 = I` and
/// `(n + ħ⁻¹ad p_{k+1}) T_n = −ħ⁻¹ Σ_{i<n} S(k)⁻¹ Ω_{k+1,n−i} S(k) T_i`.
pub fn solve_s_recursive(conn: &ConnectionSet, ring: &CohomologyRing) -> Result<MatrixSeries> {
    let n = ring.dim();
    let cutoff = conn.cutoff().clone();
    let r = cutoff.rank();
    let mut s = MatrixSeries::identity(cutoff.clone(), n);
    for k in 0..r {
        let s_inv = s.invert(n)?;
        let om = conn.omegas[k].restrict(|d| d.0[k + 1..].iter().all(|&x| x == 0));
        // Ω_{k,m}: coefficient series (in q^1..q^k) of (q^{k+1})^m
        let layers: Vec<MatrixSeries> = (0..=cutoff.orders()[k])
            .map(|m| {
                let sel = om.restrict(|d| d.0[k] == m);
                let unshift = sel.terms().map(|(d, c)| {
                    let mut e = d.clone();
                    e.0[k] = 0;
                    (e, c.clone())
                });
                MatrixSeries::from_terms(cutoff.clone(), unshift)
            })
            .collect();
        let p = ring.cup_matrix(k);
        let minus_inv_hbar = Laurent::hbar_power(-1).scale(&rat(-1));
        let mut ts: Vec<MatrixSeries> = alloc::vec![MatrixSeries::identity(cutoff.clone(), n)];
        for order in 1..=cutoff.orders()[k] {
            let mut rhs = MatrixSeries::new(cutoff.clone());
            for (i, ti) in ts.iter().enumerate() {
                let layer = &layers[order as usize - i];
                if layer.is_zero() {
                    continue;
                }
                rhs = rhs.add(&s_inv.mul(layer).mul(&s).mul(ti));
            }
            let rhs = rhs.map(|m| m.times_scalar(&minus_inv_hbar));
            let t = rhs.map(|m| solve_ad(order, &p, m));
            ts.push(t);
        }
        let mut sum = MatrixSeries::new(cutoff.clone());
        for (m, t) in ts.iter().enumerate() {
            let mut e = Exponent::zero(r);
            e.0[k] = m as u32;
            sum = sum.add(&t.shift(&e));
        }
        s = s.mul(&sum);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floer::FloerModel;
    use crate::toric::examples::*;
    use crate::toric::LambdaMode;

    fn pipeline(
        space: &crate::toric::ToricSuperspace,
        cut: &[u32],
    ) -> (CohomologyRing, ConnectionSet, MatrixSeries, BirkhoffPair, ConnectionSet) {
        let ring = CohomologyRing::build(space).unwrap();
        let fm = FloerModel::new(space, &ring, LambdaMode::Zero);
        let sinv = fm.s_inverse_matrix(&Cutoff::new(cut.to_vec())).unwrap();
        let (conn, s) = connection_from_s(&sinv, &ring).unwrap();
        let pair = birkhoff_factorize(&s, ring.dim()).unwrap();
        let hat = canonical_connection(&conn, &pair, ring.dim()).unwrap();
        (ring, conn, s, pair, hat)
    }

    #[test]
    fn projective_plane_connection_is_hbar_free() {
        // Fano with positive degree: S⁻¹ is already in ħ⁻¹, so S₊ = I
        let (ring, conn, _, pair, hat) = pipeline(&projective_plane(), &[3]);
        assert!(conn.hbar_free());
        assert_eq!(pair.plus, MatrixSeries::identity(Cutoff::new(Vec::from([3])), ring.dim()));
        assert_eq!(hat, conn);
        // quantum product p·p² = q
        let q = Exponent(alloc::vec::Vec::from([1]));
        assert_eq!(conn.get(0).get(&q).unwrap().get(0, 2), &Laurent::one());
    }

    #[test]
    fn hirzebruch_super_factorization() {
        let (ring, conn, s, pair, hat) = pipeline(&hirzebruch_super(), &[2, 2]);
        assert!(conn.is_flat());
        assert_eq!(pair.plus.mul(&pair.minus), s);
        assert!(hat.hbar_free());
        assert!(hat.is_flat());
        assert_eq!(solve_s_recursive(&hat, &ring).unwrap(), pair.minus);
    }

    #[test]
    fn recursive_solver_inverts_connection_from_s() {
        let (ring, conn, s, _, _) = pipeline(&hirzebruch(), &[2, 2]);
        assert_eq!(solve_s_recursive(&conn, &ring).unwrap(), s);
    }
}
