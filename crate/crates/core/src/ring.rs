//! Cohomology ring `ℚ[p_1..p_r]/(SR)` of a smooth complete toric variety,
//! with a monomial basis, structure constants, integration and the
//! equivariant pairing twisted by the odd bundle.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::arith::{linalg, rat, LambdaPoly, Laurent, Rational};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::series::{HLaurent, LMatrix};
use crate::toric::{LambdaMode, ToricSuperspace};

/// A cohomology class with coefficients in `ℚ[λ]`, one entry per basis
/// element.
pub type CohoClass = Vec<LambdaPoly>;

/// Monomials of total degree `k` in `r` variables, largest first
/// (`p₁^k` before `p₂^k`).
fn monomials_of_degree(r: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(r: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == r {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first);
            rec(r, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if r == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(r, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyRing {
    rank: usize,
    dim_x: usize,
    basis: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
    reductions: BTreeMap<Vec<u32>, Vec<Rational>>,
    structure: Vec<Vec<Vec<Rational>>>,
    point_coefficient: Rational,
    ray_classes: Vec<Poly>,
    bundle_classes: Vec<Poly>,
}

impl CohomologyRing {
    /// Computes a monomial basis of the quotient by the Stanley–Reisner
    /// ideal, degree by degree, keeping the monomials that are largest in
    /// graded-lex order with `p₁ > … > p_r`.
    pub fn build(space: &ToricSuperspace) -> Result<Self> {
        let r = space.rank();
        let n = space.dim();
        let linear = |row: &[i64]| {
            let mut p = Poly::zero(r);
            for (a, &x) in row.iter().enumerate() {
                p = p.add(&Poly::var(r, a).scale(&rat(x)));
            }
            p
        };
        let ray_classes: Vec<Poly> = space.gale().iter().map(|row| linear(row)).collect();
        let bundle_classes: Vec<Poly> = space.bundles().iter().map(|row| linear(row)).collect();
        let generators: Vec<(u32, Poly)> = space
            .minimal_nonfaces()
            .iter()
            .map(|set| {
                let g = set.iter().fold(Poly::one(r), |acc, &i| acc.mul(&ray_classes[i]));
                (set.len() as u32, g)
            })
            .collect();

        let mut basis: Vec<Vec<u32>> = Vec::new();
        let mut reduction_coeffs: BTreeMap<Vec<u32>, Vec<(Vec<u32>, Rational)>> = BTreeMap::new();
        for k in 0..=(n as u32 + 1) {
            let mut cols = monomials_of_degree(r, k);
            cols.reverse();
            let col_index: BTreeMap<&Vec<u32>, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut rows: Vec<Vec<Rational>> = Vec::new();
            for (gdeg, g) in &generators {
                if *gdeg > k {
                    continue;
                }
                for mu in monomials_of_degree(r, k - gdeg) {
                    let prod = g.mul(&Poly::monomial(mu, Rational::one()));
                    let mut row = vec![Rational::zero(); cols.len()];
                    for (e, c) in prod.terms() {
                        row[col_index[e]] = c.clone();
                    }
                    rows.push(row);
                }
            }
            let pivots = linalg::rref(&mut rows);
            let free: Vec<usize> = (0..cols.len()).filter(|c| !pivots.contains(c)).collect();
            if k as usize == n + 1 {
                if !free.is_empty() {
                    return Err(Error::DimensionMismatch(format!("quotient ring does not vanish in degree {}", n + 1)));
                }
                break;
            }
            // basis in this degree, largest monomial first
            for &c in free.iter().rev() {
                basis.push(cols[c].clone());
            }
            for (row, &pc) in rows.iter().zip(&pivots) {
                let terms: Vec<(Vec<u32>, Rational)> =
                    free.iter().filter(|&&c| !row[c].is_zero()).map(|&c| (cols[c].clone(), -row[c].clone())).collect();
                reduction_coeffs.insert(cols[pc].clone(), terms);
            }
        }
        let dim = basis.len();
        if dim != space.max_cones().len() {
            return Err(Error::DimensionMismatch(format!(
                "ring has dimension {dim}, expected {}",
                space.max_cones().len()
            )));
        }
        let top_count = basis.iter().filter(|m| m.iter().sum::<u32>() as usize == n).count();
        if top_count != 1 {
            return Err(Error::DimensionMismatch(format!("top degree has dimension {top_count}")));
        }
        let index: BTreeMap<Vec<u32>, usize> = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let reductions: BTreeMap<Vec<u32>, Vec<Rational>> = reduction_coeffs
            .into_iter()
            .map(|(m, terms)| {
                let mut v = vec![Rational::zero(); dim];
                for (b, c) in terms {
                    v[index[&b]] = c;
                }
                (m, v)
            })
            .collect();

        let mut ring = Self {
            rank: r,
            dim_x: n,
            basis,
            index,
            reductions,
            structure: Vec::new(),
            point_coefficient: Rational::one(),
            ray_classes,
            bundle_classes,
        };
        ring.structure = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let e: Vec<u32> = ring.basis[i].iter().zip(&ring.basis[j]).map(|(a, b)| a + b).collect();
                        ring.reduce_monomial(&e)
                    })
                    .collect()
            })
            .collect();
        let top = dim - 1;
        let mut point: Option<Rational> = None;
        for cone in space.max_cones() {
            let prod = cone.iter().fold(Poly::one(r), |acc, &i| acc.mul(&ring.ray_classes[i]));
            let nf = ring.reduce_poly(&prod);
            if nf[..top].iter().any(|c| !c.is_zero()) || nf[top].is_zero() {
                return Err(Error::DimensionMismatch("point class is not a multiple of the top class".into()));
            }
            match &point {
                None => point = Some(nf[top].clone()),
                Some(p) if *p != nf[top] => {
                    return Err(Error::DimensionMismatch("point classes of different cones disagree".into()))
                }
                _ => {}
            }
        }
        ring.point_coefficient = point.expect("at least one cone");
        Ok(ring)
    }

    fn reduce_monomial(&self, e: &[u32]) -> Vec<Rational> {
        let dim = self.basis.len();
        let mut v = vec![Rational::zero(); dim];
        if e.iter().sum::<u32>() as usize > self.dim_x {
            return v;
        }
        if let Some(&i) = self.index.get(e) {
            v[i] = Rational::one();
        } else if let Some(red) = self.reductions.get(e) {
            v.clone_from(red);
        }
        v
    }

    fn reduce_poly(&self, p: &Poly) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.basis.len()];
        for (e, c) in p.terms() {
            for (x, y) in v.iter_mut().zip(self.reduce_monomial(e)) {
                *x += c * y;
            }
        }
        v
    }

    /// Normal form of a polynomial in the `p_a`.
    pub fn normal_form(&self, p: &Poly) -> CohoClass {
        self.reduce_poly(p).into_iter().map(LambdaPoly::constant).collect()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Complex dimension of the variety.
    pub fn variety_dim(&self) -> usize {
        self.dim_x
    }

    /// Exponent vectors of the basis monomials.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Cohomological degree `2|T_i|` of each basis element.
    pub fn basis_degrees(&self) -> Vec<i64> {
        self.basis.iter().map(|m| 2 * m.iter().sum::<u32>() as i64).collect()
    }

    /// Name of basis element `i`, e.g. `p1*p2` or `1`.
    pub fn basis_name(&self, i: usize) -> String {
        let names: Vec<String> = (1..=self.rank).map(|a| format!("p{a}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Poly::monomial(self.basis[i].clone(), Rational::one()).render(&refs)
    }

    /// Structure constants: `T_i T_j = Σ_k c[k] T_k`.
    pub fn structure(&self, i: usize, j: usize) -> &[Rational] {
        &self.structure[i][j]
    }

    pub fn zero_class(&self) -> CohoClass {
        vec![LambdaPoly::zero(); self.dim()]
    }

    pub fn unit_class(&self) -> CohoClass {
        let mut c = self.zero_class();
        c[0] = LambdaPoly::one();
        c
    }

    /// The class `u_i = Σ_a m_i^a p_a` of the toric divisor of ray `i`.
    pub fn ray_class(&self, i: usize) -> CohoClass {
        self.normal_form(&self.ray_classes[i])
    }

    /// The class `v_j = Σ_a l_j^a p_a` of the `j`-th line bundle.
    pub fn bundle_class(&self, j: usize) -> CohoClass {
        self.normal_form(&self.bundle_classes[j])
    }

    pub fn generator_class(&self, a: usize) -> CohoClass {
        self.normal_form(&Poly::var(self.rank, a))
    }

    pub fn mul(&self, x: &CohoClass, y: &CohoClass) -> CohoClass {
        let mut out = self.zero_class();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.structure[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &ab.scale(c);
                    }
                }
            }
        }
        out
    }

    /// Product of classes with Laurent coefficients.
    pub fn mul_h(&self, x: &HLaurent, y: &HLaurent) -> HLaurent {
        let mut out = HLaurent::zero(self.dim());
        for (i, a) in x.comps().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.comps().iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.structure[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        *out.get_mut(k) += &ab.scale(c);
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by a class (column `j` is `x·T_j`).
    pub fn mult_matrix(&self, x: &CohoClass) -> LMatrix {
        let n = self.dim();
        let mut m = LMatrix::zero(n);
        for j in 0..n {
            let mut tj = self.zero_class();
            tj[j] = LambdaPoly::one();
            let col = self.mul(x, &tj);
            for (i, c) in col.into_iter().enumerate() {
                m.set(i, j, Laurent::from_lambda_poly(c));
            }
        }
        m
    }

    /// Matrix of cup product with `p_a`.
    pub fn cup_matrix(&self, a: usize) -> LMatrix {
        self.mult_matrix(&self.generator_class(a))
    }

    /// Integral over the variety, normalized so the point class integrates
    /// to one.
    pub fn integrate(&self, x: &CohoClass) -> LambdaPoly {
        x[self.dim() - 1].scale(&self.point_coefficient.recip())
    }

    pub fn integrate_h(&self, x: &HLaurent) -> Laurent {
        x.get(self.dim() - 1).scale(&self.point_coefficient.recip())
    }

    /// Euler class `∏_j (v_j − λ)` of the odd bundle (the unit when there
    /// is no bundle or `λ` is not tracked and no bundle occurs).
    pub fn euler_class(&self, mode: LambdaMode) -> CohoClass {
        let mut e = self.unit_class();
        for j in 0..self.bundle_classes.len() {
            let mut f = self.bundle_class(j);
            if mode == LambdaMode::Symbolic {
                f[0] -= &LambdaPoly::lambda();
            }
            e = self.mul(&e, &f);
        }
        e
    }

    /// Pairing `G_ij = ∫ T_i T_j e(V)` twisted by the Euler class.
    pub fn pairing_matrix(&self, mode: LambdaMode) -> LMatrix {
        let n = self.dim();
        let e = self.euler_class(mode);
        let mut g = LMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                let tij: CohoClass = self.structure[i][j].iter().map(|c| LambdaPoly::constant(c.clone())).collect();
                g.set(i, j, Laurent::from_lambda_poly(self.integrate(&self.mul(&tij, &e))));
            }
        }
        g
    }

    /// Evaluates a polynomial in `(P_1..P_r, ħ, λ)` at `P_a = p_a + d_a ħ`.
    pub fn eval_shifted(&self, poly: &Poly, d: &[i64], mode: LambdaMode) -> HLaurent {
        let n = self.dim();
        let one = HLaurent::basis(n, 0);
        let mut vars: Vec<HLaurent> = (0..self.rank)
            .map(|a| {
                let mut v = HLaurent::from_class(&self.generator_class(a));
                *v.get_mut(0) += &Laurent::hbar_power(1).scale(&rat(d[a]));
                v
            })
            .collect();
        vars.push(one.map(|x| x.shift(1)));
        vars.push(match mode {
            LambdaMode::Symbolic => one.map(|x| x * &Laurent::lambda()),
            LambdaMode::Zero => HLaurent::zero(n),
        });
        poly.eval(
            &vars,
            &one,
            |a, b| self.mul_h(a, b),
            |a, c| a.map(|x| x.scale(c)),
            |a, b| {
                let mut s = a.clone();
                for i in 0..n {
                    *s.get_mut(i) += b.get(i);
                }
                s
            },
        )
    }

    /// Representative polynomial of basis element `i` in the variables
    /// `(P_1..P_r, ħ, λ)`.
    pub fn basis_poly(&self, i: usize) -> Poly {
        let mut e = self.basis[i].clone();
        e.extend([0, 0]);
        Poly::monomial(e, Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::examples::*;

    fn class(v: &[i64]) -> CohoClass {
        v.iter().map(|&x| LambdaPoly::constant(rat(x))).collect()
    }

    #[test]
    fn hirzebruch_ring() {
        let ring = CohomologyRing::build(&hirzebruch()).unwrap();
        assert_eq!(ring.basis(), &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        // p₁² = 0 and p₂² = p₁p₂
        let p1 = ring.generator_class(0);
        let p2 = ring.generator_class(1);
        assert_eq!(ring.mul(&p1, &p1), class(&[0, 0, 0, 0]));
        assert_eq!(ring.mul(&p2, &p2), class(&[0, 0, 0, 1]));
        assert_eq!(ring.integrate(&ring.mul(&p1, &p2)), LambdaPoly::one());
    }

    #[test]
    fn projective_plane_ring() {
        let ring = CohomologyRing::build(&projective_plane()).unwrap();
        assert_eq!(ring.basis(), &[vec![0], vec![1], vec![2]]);
        let p = ring.generator_class(0);
        assert_eq!(ring.mul(&p, &ring.mul(&p, &p)), class(&[0, 0, 0]));
        assert_eq!(ring.integrate(&ring.mul(&p, &p)), LambdaPoly::one());
    }

    #[test]
    fn superspace_pairing_at_zero_weight() {
        let ring = CohomologyRing::build(&hirzebruch_super()).unwrap();
        let g = ring.pairing_matrix(LambdaMode::Zero);
        let expected = [[0, 2, 2, 0], [2, 0, 0, 0], [2, 0, 0, 0], [0, 0, 0, 0]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.get(i, j), &Laurent::from_int(expected[i][j]), "entry {i},{j}");
            }
        }
    }

    #[test]
    fn symbolic_pairing_is_nondegenerate() {
        let ring = CohomologyRing::build(&hirzebruch_super()).unwrap();
        let g = ring.pairing_matrix(LambdaMode::Symbolic);
        // G(T_0, T_top) = ∫ p₁p₂ (2p₂ − λ) ... only −λ survives in top degree
        assert_eq!(g.get(0, 3), &(-&Laurent::lambda()));
    }
}
