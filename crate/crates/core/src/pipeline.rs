//! The full computation chain from toric data to quantum products, and the
//! invariant suite run over its outputs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dmodule::{
    birkhoff_factorize, canonical_connection, connection_from_s, solve_s_recursive, BirkhoffPair, ConnectionSet,
};
use crate::error::{Error, Result};
use crate::floer::FloerModel;
use crate::grading::Grading;
use crate::mirror::{canonical_j, extract_mirror, flat_connection, quantum_products, MirrorData, QuantumTable};
use crate::ring::CohomologyRing;
use crate::series::{Cutoff, Exponent, HLaurent, LMatrix, MatrixSeries, VectorSeries};
use crate::toric::{LambdaMode, ToricSuperspace};

/// Outputs of the mirror stage, present when the superspace is nef.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorStage {
    pub data: MirrorData,
    pub flat: ConnectionSet,
    pub table: QuantumTable,
    pub canonical_j: VectorSeries,
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub space: ToricSuperspace,
    pub ring: CohomologyRing,
    pub cutoff: Cutoff,
    pub mode: LambdaMode,
    pub s_inverse: MatrixSeries,
    pub s: MatrixSeries,
    pub connection: ConnectionSet,
    pub birkhoff: BirkhoffPair,
    pub canonical: ConnectionSet,
    pub pairing: LMatrix,
    pub mirror: core::result::Result<MirrorStage, Error>,
}

impl Pipeline {
    /// Runs every stage. Mirror-stage failures are kept in `mirror` so the
    /// earlier stages stay available.
    pub fn run(space: ToricSuperspace, cutoff: Cutoff, mode: LambdaMode) -> Result<Self> {
        let ring = CohomologyRing::build(&space)?;
        let s_inverse = FloerModel::new(&space, &ring, mode).s_inverse_matrix(&cutoff)?;
        Self::from_s_inverse(space, ring, cutoff, mode, s_inverse)
    }

    /// Continues the chain from a precomputed `S⁻¹`.
    pub fn from_s_inverse(
        space: ToricSuperspace,
        ring: CohomologyRing,
        cutoff: Cutoff,
        mode: LambdaMode,
        s_inverse: MatrixSeries,
    ) -> Result<Self> {
        if cutoff.rank() != space.rank() {
            return Err(Error::DimensionMismatch(format!(
                "cutoff has {} entries, expected {}",
                cutoff.rank(),
                space.rank()
            )));
        }
        let n = ring.dim();
        let (connection, s) = connection_from_s(&s_inverse, &ring)?;
        let birkhoff = birkhoff_factorize(&s, n)?;
        let canonical = canonical_connection(&connection, &birkhoff, n)?;
        let pairing = ring.pairing_matrix(mode);
        let mirror = mirror_stage(&space, &ring, &canonical, &birkhoff, &s_inverse, &pairing);
        Ok(Self { space, ring, cutoff, mode, s_inverse, s, connection, birkhoff, canonical, pairing, mirror })
    }

    pub fn floer(&self) -> FloerModel<'_> {
        FloerModel::new(&self.space, &self.ring, self.mode)
    }

    pub fn grading(&self) -> Grading {
        Grading::new(&self.space, &self.ring)
    }

    /// Runs the invariant suite.
    pub fn verify(&self) -> VerifyReport {
        let mut rep = VerifyReport::default();
        let n = self.ring.dim();
        let grading = self.grading();

        rep.flag("connection is flat", self.connection.is_flat(), "");
        rep.flag(
            "canonical connection is flat and hbar-free",
            self.canonical.is_flat() && self.canonical.hbar_free(),
            "",
        );
        let graded = [
            ("S^-1", &self.s_inverse, 0),
            ("S", &self.s, 0),
            ("S+", &self.birkhoff.plus, 0),
            ("S-", &self.birkhoff.minus, 0),
        ];
        for (name, m, deg) in graded {
            rep.exponent(format!("grading of {name}"), grading.check_matrix(m, deg));
        }
        for (a, om) in self.connection.omegas.iter().enumerate() {
            rep.exponent(format!("grading of Omega_{}", a + 1), grading.check_matrix(om, 2));
        }
        for (a, om) in self.canonical.omegas.iter().enumerate() {
            rep.exponent(format!("grading of canonical Omega_{}", a + 1), grading.check_matrix(om, 2));
        }

        rep.flag("Birkhoff identity S = S+ S-", self.birkhoff.plus.mul(&self.birkhoff.minus) == self.s, "");
        let refactor = birkhoff_factorize(&self.birkhoff.plus.mul(&self.birkhoff.minus), n);
        rep.flag("Birkhoff uniqueness", refactor.as_ref() == Ok(&self.birkhoff), "");

        let g = MatrixSeries::constant(self.cutoff.clone(), self.pairing.clone());
        let minus = &self.birkhoff.minus;
        let unitary = minus.bar().transpose().mul(&g).mul(minus) == g;
        rep.flag("unitarity of S-", unitary, "");
        let self_adjoint = self.canonical.omegas.iter().all(|om| g.mul(om) == om.transpose().mul(&g));
        rep.flag("canonical connection is self-adjoint", self_adjoint, "");

        match solve_s_recursive(&self.canonical, &self.ring) {
            Ok(s) => rep.flag("recursive solver reproduces S-", s == *minus, ""),
            Err(e) => rep.fail("recursive solver reproduces S-", format!("{e}")),
        }

        let fm = self.floer();
        let mut pairing_ok = Ok(());
        'outer: for i in 0..n {
            for j in 0..n {
                match fm.floer_pairing(&fm.basis_cycle(i), &fm.basis_cycle(j), &self.cutoff) {
                    Ok(p) => {
                        let c0 = p.constant_term().cloned().unwrap_or_default();
                        if c0 != *self.pairing.get(i, j) {
                            pairing_ok = Err(format!("constant term of ({i},{j}) differs from the pairing"));
                            break 'outer;
                        }
                    }
                    Err(e) => {
                        pairing_ok = Err(format!("{e}"));
                        break 'outer;
                    }
                }
            }
        }
        rep.result("Floer pairing polynomial in hbar", pairing_ok);

        let mut pf_ok = Ok(());
        for a in 0..self.space.rank() {
            let mut d = alloc::vec![0i64; self.space.rank()];
            d[a] = 1;
            let rel = fm.picard_fuchs_relation(&d);
            match fm.verify_pf(&rel, &self.cutoff) {
                Ok(c) if c.holds => {}
                Ok(c) => {
                    pf_ok = Err(format!("relation {} fails at {:?}", a + 1, c.first_mismatch));
                    break;
                }
                Err(e) => {
                    pf_ok = Err(format!("{e}"));
                    break;
                }
            }
        }
        rep.result("Picard-Fuchs relations", pf_ok);

        match &self.mirror {
            Err(Error::NefViolated(a)) => {
                rep.skip("mirror transformation", format!("degree of q{} is negative", a + 1));
            }
            Err(e) => rep.fail("mirror transformation", format!("{e}")),
            Ok(stage) => self.verify_mirror(stage, &grading, &mut rep),
        }
        rep
    }

    fn verify_mirror(&self, stage: &MirrorStage, grading: &Grading, rep: &mut VerifyReport) {
        let n = self.ring.dim();
        rep.flag("mirror transformation", true, "");
        rep.exponent("grading of potential".into(), grading.check_scalar(&stage.data.potential, 2));
        rep.exponent("grading of gauge factor".into(), grading.check_scalar(&stage.data.gauge_factor, 0));
        for (a, d) in stage.data.delta.iter().enumerate() {
            rep.exponent(format!("grading of coordinate shift {}", a + 1), grading.check_scalar(d, 0));
        }
        rep.flag("flat connection is flat and hbar-free", stage.flat.is_flat() && stage.flat.hbar_free(), "");
        let classical =
            stage.flat.omegas.iter().enumerate().all(|(a, om)| om.constant_term() == Some(&self.ring.cup_matrix(a)));
        rep.flag("flat connection reduces to cup product", classical, "");
        rep.flag("Frobenius symmetry of quantum products", stage.table.is_frobenius(), "");

        let identity = MatrixSeries::identity(self.cutoff.clone(), n);
        let again = extract_mirror(&stage.flat, &identity, &self.ring, grading.q_degrees());
        let unique = match again {
            Ok(m) => {
                m.potential.is_zero()
                    && m.delta.iter().all(|d| d.is_zero())
                    && m.gauge_factor == crate::series::ScalarSeries::one(self.cutoff.clone())
            }
            Err(_) => false,
        };
        rep.flag("mirror map of flat connection is trivial", unique, "");

        match solve_s_recursive(&stage.flat, &self.ring).and_then(|s| s.invert(n)) {
            Ok(sinv) => {
                let col = sinv.column(0);
                let asymptotic = col.terms().all(|(d, v)| {
                    v.comps().iter().all(|c| c.coeff(-1).is_zero())
                        && (d.is_zero() || v.comps().iter().all(|c| c.coeff(0).is_zero()))
                });
                rep.flag("canonical J asymptotics", asymptotic, "");
                rep.flag("canonical J matches flat section", col == stage.canonical_j, "");
            }
            Err(e) => rep.fail("canonical J asymptotics", format!("{e}")),
        }
    }
}

fn mirror_stage(
    space: &ToricSuperspace,
    ring: &CohomologyRing,
    canonical: &ConnectionSet,
    birkhoff: &BirkhoffPair,
    s_inverse: &MatrixSeries,
    pairing: &LMatrix,
) -> Result<MirrorStage> {
    let data = extract_mirror(canonical, &birkhoff.plus, ring, &space.degree_vector())?;
    let flat = flat_connection(canonical, &data, ring)?;
    let table = quantum_products(&flat, pairing);
    let j = s_inverse.column(0);
    let canonical_j = canonical_j(&j, &data, ring)?;
    Ok(MirrorStage { data, flat, table, canonical_j })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

/// One line per invariant checked.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    fn push(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.checks.push(CheckOutcome { name: name.into(), status, detail: detail.into() });
    }

    fn flag(&mut self, name: &str, ok: bool, detail: &str) {
        self.push(name, if ok { Status::Pass } else { Status::Fail }, detail);
    }

    fn fail(&mut self, name: &str, detail: String) {
        self.push(name, Status::Fail, detail);
    }

    fn skip(&mut self, name: &str, detail: String) {
        self.push(name, Status::Skipped, detail);
    }

    fn result(&mut self, name: &str, r: core::result::Result<(), String>) {
        match r {
            Ok(()) => self.push(name, Status::Pass, ""),
            Err(e) => self.push(name, Status::Fail, e),
        }
    }

    fn exponent(&mut self, name: String, r: core::result::Result<(), Exponent>) {
        match r {
            Ok(()) => self.push(name, Status::Pass, ""),
            Err(d) => self.push(name, Status::Fail, format!("at q^{d}")),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `Ξ(P_a · T_j Δ) = (ħ q^a∂_a + p_a) Ξ(T_j Δ)` for every basis element and
/// direction.
pub fn check_intertwining(fm: &FloerModel<'_>, cutoff: &Cutoff) -> Result<bool> {
    let ring = fm.ring();
    let r = ring.rank();
    for j in 0..ring.dim() {
        let base = fm.basis_cycle(j);
        let xi = fm.xi(&base, cutoff)?;
        for a in 0..r {
            let mut shifted = base.clone();
            shifted.poly = base.poly.mul(&crate::poly::Poly::var(r + 2, a));
            let lhs = fm.xi(&shifted, cutoff)?;
            let p = HLaurent::from_class(&ring.generator_class(a));
            let rhs = xi.log_derivative(a).map(|v| v.map(|x| x.shift(1))).add(&xi.map(|v| ring.mul_h(&p, v)));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::examples::*;

    #[test]
    fn suites_pass_on_fixtures() {
        let cases = [
            (projective_line(), alloc::vec![3]),
            (projective_plane(), alloc::vec![3]),
            (hirzebruch(), alloc::vec![2, 2]),
            (hirzebruch_super(), alloc::vec![2, 3]),
        ];
        for (space, cut) in cases {
            let p = Pipeline::run(space, Cutoff::new(cut), LambdaMode::Zero).unwrap();
            let rep = p.verify();
            for c in &rep.checks {
                assert_ne!(c.status, Status::Fail, "{}: {}", c.name, c.detail);
            }
        }
    }

    #[test]
    fn intertwining_holds() {
        let space = hirzebruch_super();
        let ring = CohomologyRing::build(&space).unwrap();
        let fm = FloerModel::new(&space, &ring, LambdaMode::Symbolic);
        assert!(check_intertwining(&fm, &Cutoff::new(alloc::vec![2, 2])).unwrap());
    }
}
