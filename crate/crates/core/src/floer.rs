//! Givental's model of equivariant Floer cohomology for a toric
//! superspace: Floer cycles `T(P,ħ,λ)·Δ_d`, the localization map `Ξ`, the
//! matrix `S⁻¹ = Ξ∘Φ`, the J-function, Picard–Fuchs relations and the
//! Floer pairing.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{rat, Laurent};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ring::CohomologyRing;
use crate::series::{
    check_hbar_bound, inv_linear, Coefficient, Cutoff, Exponent, HLaurent, LMatrix, MatrixSeries, ScalarSeries,
    VectorSeries,
};
use crate::toric::{LambdaMode, ToricSuperspace};

/// A Floer cycle `T(P, ħ, λ) · Δ_s`: a polynomial in the variables
/// `(P_1..P_r, ħ, λ)` acting on the shifted fundamental cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloerCycle {
    pub poly: Poly,
    pub shift: Vec<i64>,
}

impl FloerCycle {
    pub fn new(poly: Poly, shift: Vec<i64>) -> Self {
        Self { poly, shift }
    }

    /// `Δ` itself.
    pub fn fundamental(rank: usize) -> Self {
        Self { poly: Poly::one(rank + 2), shift: vec![0; rank] }
    }
}

/// A Picard–Fuchs relation `left = right` in the Floer module, where
/// `left` carries the shift `Q^{d*}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfRelation {
    pub d: Vec<i64>,
    pub left: FloerCycle,
    pub right: FloerCycle,
}

/// Outcome of comparing both sides of a relation under `Ξ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfCheck {
    pub holds: bool,
    pub first_mismatch: Option<Exponent>,
}

pub struct FloerModel<'a> {
    space: &'a ToricSuperspace,
    ring: &'a CohomologyRing,
    mode: LambdaMode,
}

impl<'a> FloerModel<'a> {
    pub fn new(space: &'a ToricSuperspace, ring: &'a CohomologyRing, mode: LambdaMode) -> Self {
        Self { space, ring, mode }
    }

    pub fn space(&self) -> &ToricSuperspace {
        self.space
    }

    pub fn ring(&self) -> &CohomologyRing {
        self.ring
    }

    pub fn mode(&self) -> LambdaMode {
        self.mode
    }

    fn nvars(&self) -> usize {
        self.space.rank() + 2
    }

    fn unit(&self) -> HLaurent {
        HLaurent::basis(self.ring.dim(), 0)
    }

    /// `x · (c + νħ)` for a class `c`.
    fn times_linear(&self, x: &HLaurent, class: &HLaurent, nu: i64) -> HLaurent {
        let mut out = self.ring.mul_h(x, class);
        if nu != 0 {
            out.accumulate(&x.map(|e| e.shift(1).scale(&rat(nu))));
        }
        out
    }

    /// `i_d^*(1/Δ_d)`: the localization contribution of the class `d`.
    ///
    /// Defined for any `d ∈ ℤʳ` whose bundle degrees are nonnegative.
    pub fn localization_unit(&self, d: &[i64]) -> Result<HLaurent> {
        let ring = self.ring;
        let bundle_degrees = self.space.bundle_degrees(d);
        if let Some(j) = bundle_degrees.iter().position(|&k| k < 0) {
            return Err(Error::NegativeBundleDegree { j, d: d.to_vec() });
        }
        let mut x = self.unit();
        for (i, &k) in self.space.ray_degrees(d).iter().enumerate() {
            let u = HLaurent::from_class(&ring.ray_class(i));
            if k >= 0 {
                for nu in 1..=k {
                    let inv = inv_linear(&self.unit(), |y| ring.mul_h(y, &u), &rat(nu));
                    x = ring.mul_h(&x, &inv);
                }
            } else {
                for nu in (k + 1)..=0 {
                    x = self.times_linear(&x, &u, nu);
                }
            }
            if x.is_zero() {
                return Ok(x);
            }
        }
        for (j, &k) in bundle_degrees.iter().enumerate() {
            let mut v = HLaurent::from_class(&ring.bundle_class(j));
            if self.mode == LambdaMode::Symbolic {
                *v.get_mut(0) -= &Laurent::lambda();
            }
            for nu in 1..=k {
                x = self.times_linear(&x, &v, nu);
            }
        }
        Ok(x)
    }

    /// `i_d^*(T(P)/Δ_d) = T(p + dħ) · i_d^*(1/Δ_d)`.
    pub fn localization_coefficient(&self, d: &[i64], t: &Poly) -> Result<HLaurent> {
        let base = self.localization_unit(d)?;
        if base.is_zero() {
            return Ok(base);
        }
        let tv = self.ring.eval_shifted(t, d, self.mode);
        Ok(self.ring.mul_h(&tv, &base))
    }

    /// The coefficient of `q^d` in `S⁻¹`: column `j` is `i_d^*(T_j(P)/Δ_d)`.
    pub fn s_inverse_coefficient(&self, d: &Exponent) -> Result<LMatrix> {
        let di = d.as_i64();
        let base = self.localization_unit(&di)?;
        let n = self.ring.dim();
        if base.is_zero() {
            return Ok(LMatrix::zero(n));
        }
        let cols: Vec<HLaurent> = (0..n)
            .map(|j| {
                let t = self.ring.eval_shifted(&self.ring.basis_poly(j), &di, self.mode);
                self.ring.mul_h(&t, &base)
            })
            .collect();
        Ok(LMatrix::from_columns(&cols))
    }

    /// `S⁻¹ = Ξ∘Φ` truncated to the box.
    pub fn s_inverse_matrix(&self, cutoff: &Cutoff) -> Result<MatrixSeries> {
        let mut out = MatrixSeries::new(cutoff.clone());
        for d in cutoff.exponents() {
            let c = self.s_inverse_coefficient(&d)?;
            out.add_term(d, c);
        }
        self.check_bound(&out, cutoff)?;
        Ok(out)
    }

    /// Runaway guard on the `ħ`-exponents of a series built in this model.
    pub fn check_bound<C: crate::series::HbarGraded>(
        &self,
        s: &crate::series::QSeries<C>,
        cutoff: &Cutoff,
    ) -> Result<()> {
        check_hbar_bound(s, self.space.hbar_bound(cutoff.orders()))
    }

    /// `S⁻¹(1) = Ξ(Δ)`; the J-function is `e^{Σ p_a log q^a / ħ}` times this.
    pub fn j_function(&self, cutoff: &Cutoff) -> Result<VectorSeries> {
        self.xi(&FloerCycle::fundamental(self.space.rank()), cutoff)
    }

    /// `Ξ(T(P)·Δ_s) = Σ_e q^e T(p + eħ) i_{e−s}^*(1/Δ_{e−s})`.
    ///
    /// Classes `e − s` outside the nonnegative orthant contribute nothing.
    pub fn xi(&self, cycle: &FloerCycle, cutoff: &Cutoff) -> Result<VectorSeries> {
        let mut out = VectorSeries::new(cutoff.clone());
        for e in cutoff.exponents() {
            let ei = e.as_i64();
            let d: Vec<i64> = ei.iter().zip(&cycle.shift).map(|(a, b)| a - b).collect();
            if d.iter().any(|&x| x < 0) {
                continue;
            }
            let base = self.localization_unit(&d)?;
            if base.is_zero() {
                continue;
            }
            let t = self.ring.eval_shifted(&cycle.poly, &ei, self.mode);
            out.add_term(e, self.ring.mul_h(&t, &base));
        }
        Ok(out)
    }

    fn u_factor(&self, i: usize, nu: i64) -> Poly {
        let r = self.space.rank();
        let mut p = Poly::zero(self.nvars());
        for (a, &m) in self.space.gale()[i].iter().enumerate() {
            p = p.add(&Poly::var(self.nvars(), a).scale(&rat(m)));
        }
        p.sub(&Poly::var(self.nvars(), r).scale(&rat(nu)))
    }

    fn v_factor(&self, j: usize, nu: i64) -> Poly {
        let r = self.space.rank();
        let mut p = Poly::zero(self.nvars());
        for (a, &l) in self.space.bundles()[j].iter().enumerate() {
            p = p.add(&Poly::var(self.nvars(), a).scale(&rat(l)));
        }
        p = p.sub(&Poly::var(self.nvars(), r).scale(&rat(nu)));
        if self.mode == LambdaMode::Symbolic {
            p = p.sub(&Poly::var(self.nvars(), r + 1));
        }
        p
    }

    /// The relation `(Q^d)^*Δ · L = Δ · R` obtained by comparing the
    /// infinite products defining `Δ` and `Δ_d`.
    pub fn picard_fuchs_relation(&self, d: &[i64]) -> PfRelation {
        let nv = self.nvars();
        let mut left = Poly::one(nv);
        let mut right = Poly::one(nv);
        for (i, &k) in self.space.ray_degrees(d).iter().enumerate() {
            if k < 0 {
                for nu in k..0 {
                    left = left.mul(&self.u_factor(i, nu));
                }
            } else {
                for nu in 0..k {
                    right = right.mul(&self.u_factor(i, nu));
                }
            }
        }
        for (j, &k) in self.space.bundle_degrees(d).iter().enumerate() {
            if k > 0 {
                for nu in 0..k {
                    left = left.mul(&self.v_factor(j, nu));
                }
            } else {
                for nu in k..0 {
                    right = right.mul(&self.v_factor(j, nu));
                }
            }
        }
        PfRelation {
            d: d.to_vec(),
            left: FloerCycle::new(left, d.to_vec()),
            right: FloerCycle::new(right, vec![0; d.len()]),
        }
    }

    /// Compares `Ξ` of both sides of a relation inside the box.
    pub fn verify_pf(&self, rel: &PfRelation, cutoff: &Cutoff) -> Result<PfCheck> {
        let l = self.xi(&rel.left, cutoff)?;
        let r = self.xi(&rel.right, cutoff)?;
        let diff = l.sub(&r);
        let first = diff.terms().next().map(|(d, _)| d.clone());
        Ok(PfCheck { holds: first.is_none(), first_mismatch: first })
    }

    /// `(α, β) = ∫ Ξ̄(α) ∪ Ξ(β) ∪ e(V)`, which must be polynomial in `ħ`.
    pub fn floer_pairing(&self, alpha: &FloerCycle, beta: &FloerCycle, cutoff: &Cutoff) -> Result<ScalarSeries> {
        let xa = self.xi(alpha, cutoff)?.map(|v| v.map(Laurent::bar));
        let xb = self.xi(beta, cutoff)?;
        let euler = HLaurent::from_class(&self.ring.euler_class(self.mode));
        let prod = xa.mul_with(&xb, |a, b| self.ring.mul_h(&self.ring.mul_h(a, b), &euler));
        let out = prod.map(|v| self.ring.integrate_h(v));
        for (d, c) in out.terms() {
            if c.min_exponent().is_some_and(|k| k < 0) {
                return Err(Error::NonPolynomialPairing(d.clone()));
            }
        }
        Ok(out)
    }

    /// The Floer cycle `T_j(P)·Δ` of basis element `j`.
    pub fn basis_cycle(&self, j: usize) -> FloerCycle {
        FloerCycle::new(self.ring.basis_poly(j), vec![0; self.space.rank()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{ratio, LambdaPoly, Rational};
    use crate::toric::examples::*;

    fn lp(x: Rational) -> LambdaPoly {
        LambdaPoly::constant(x)
    }

    #[test]
    fn hirzebruch_first_localization() {
        // d = (1,0): (p₂ − p₁)ħ⁻² − 2p₁p₂ħ⁻³
        let x = hirzebruch();
        let ring = CohomologyRing::build(&x).unwrap();
        let fm = FloerModel::new(&x, &ring, LambdaMode::Zero);
        let v = fm.localization_unit(&[1, 0]).unwrap();
        assert_eq!(v.get(0), &Laurent::zero());
        assert_eq!(v.get(1), &Laurent::monomial(-2, lp(rat(-1))));
        assert_eq!(v.get(2), &Laurent::monomial(-2, lp(rat(1))));
        assert_eq!(v.get(3), &Laurent::monomial(-3, lp(rat(-2))));
    }

    #[test]
    fn projective_line_j_function() {
        // oracle: 1/∏_{ν=1}^{d}(p + νħ)² with p² = 0 is
        // (1/(d!)²ħ^{2d}) (1 − 2 p H_d / ħ), H_d the harmonic number
        let x = projective_line();
        let ring = CohomologyRing::build(&x).unwrap();
        let fm = FloerModel::new(&x, &ring, LambdaMode::Zero);
        let j = fm.j_function(&Cutoff::new(vec![4])).unwrap();
        let mut fact = rat(1);
        let mut harmonic = rat(0);
        for d in 1..=4i64 {
            fact *= rat(d);
            harmonic += ratio(1, d);
            let c = j.get(&Exponent(vec![d as u32])).unwrap();
            let a = (&fact * &fact).recip();
            assert_eq!(c.get(0), &Laurent::monomial(-2 * d as i32, lp(a.clone())));
            assert_eq!(c.get(1), &Laurent::monomial(-2 * d as i32 - 1, lp(-(rat(2) * &harmonic * &a))));
        }
    }

    #[test]
    fn vanishing_outside_effective_cone() {
        let x = hirzebruch();
        let ring = CohomologyRing::build(&x).unwrap();
        let fm = FloerModel::new(&x, &ring, LambdaMode::Zero);
        for d in [[-1, 0], [-1, 1], [0, -1], [2, -1], [-2, 3]] {
            assert!(fm.localization_unit(&d).unwrap().is_zero(), "d = {d:?}");
        }
    }

    #[test]
    fn negative_bundle_degree_is_rejected() {
        let x = hirzebruch_super();
        let ring = CohomologyRing::build(&x).unwrap();
        let fm = FloerModel::new(&x, &ring, LambdaMode::Zero);
        assert!(matches!(fm.localization_unit(&[0, -1]), Err(Error::NegativeBundleDegree { .. })));
    }
}
