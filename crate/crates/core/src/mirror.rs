//! Mirror transformation: from the gauge-fixed connection, extract the
//! potential, the flat coordinates and the scalar gauge factor; rewrite
//! the connection in flat coordinates; read off quantum products; and
//! build the canonical J-function.

use alloc::vec::Vec;

use crate::arith::Laurent;
use crate::dmodule::ConnectionSet;
use crate::error::{Error, Result};
use crate::ring::CohomologyRing;
use crate::series::{
    log_integrate, reverse_coordinates, substitute, Coefficient, LMatrix, MatrixSeries, ScalarSeries, VectorSeries,
};

/// Data of the mirror transformation.
///
/// Coordinates are related by `q̂^a = q^a exp(ε^a(q))` and, inversely,
/// `q^a = q̂^a exp(δ^a(q̂))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorData {
    /// Potential `F(q)` with `q^a∂_aF = −(Ω̂_a)_{1,1}`.
    pub potential: ScalarSeries,
    /// `F` expressed in the flat coordinates `q̂`.
    pub potential_flat: ScalarSeries,
    /// `ε^a(q) = log q̂^a − log q^a`.
    pub log_shift: Vec<ScalarSeries>,
    /// `δ^a(q̂) = log q^a − log q̂^a`.
    pub delta: Vec<ScalarSeries>,
    /// Scalar factor by which the positive Birkhoff factor acts on the unit.
    pub gauge_factor: ScalarSeries,
    /// The gauge factor in flat coordinates.
    pub gauge_factor_flat: ScalarSeries,
}

impl MirrorData {
    /// `q^a / q̂^a = exp(δ^a(q̂))` for every `a`.
    pub fn forward_ratio(&self) -> Result<Vec<ScalarSeries>> {
        self.delta.iter().map(ScalarSeries::exp).collect()
    }

    /// `q̂^a / q^a = exp(ε^a(q))` for every `a`.
    pub fn inverse_ratio(&self) -> Result<Vec<ScalarSeries>> {
        self.log_shift.iter().map(ScalarSeries::exp).collect()
    }
}

/// Requires every Kähler variable to have nonnegative degree, and the
/// degree-0 and degree-2 parts of the basis to be `1` and the `p_a`.
pub fn check_nef(deg_q: &[i64], ring: &CohomologyRing) -> Result<()> {
    if let Some(a) = deg_q.iter().position(|&x| x < 0) {
        return Err(Error::NefViolated(a));
    }
    let degs = ring.basis_degrees();
    let zero = degs.iter().filter(|&&d| d == 0).count();
    let two = degs.iter().filter(|&&d| d == 2).count();
    if zero != 1 || two != ring.rank() {
        return Err(Error::DimensionMismatch("unexpected low-degree basis".into()));
    }
    Ok(())
}

/// Reads the mirror data off the first column of the gauge-fixed
/// connection and the first column of the positive Birkhoff factor.
pub fn extract_mirror(
    hat: &ConnectionSet,
    plus: &MatrixSeries,
    ring: &CohomologyRing,
    deg_q: &[i64],
) -> Result<MirrorData> {
    check_nef(deg_q, ring)?;
    let r = ring.rank();
    let n = ring.dim();
    let degs = ring.basis_degrees();
    let mut f_derivs = Vec::with_capacity(r);
    let mut g: Vec<Vec<ScalarSeries>> = Vec::with_capacity(r);
    for a in 0..r {
        let om = hat.get(a);
        for (d, m) in om.terms() {
            if (0..n).any(|i| degs[i] > 2 && !m.get(i, 0).is_zero()) {
                return Err(Error::ColumnNotInSpan { a, d: d.clone() });
            }
        }
        f_derivs.push(om.entry(0, 0).neg());
        // rows 1..=r of the first column are the p_b components
        let mut row = Vec::with_capacity(r);
        for b in 0..r {
            let mut e = om.entry(b + 1, 0);
            if a == b {
                e = e.sub(&ScalarSeries::one(e.cutoff().clone()));
            }
            row.push(e);
        }
        g.push(row);
    }
    let potential = log_integrate(&f_derivs)?;
    let log_shift: Vec<ScalarSeries> =
        (0..r).map(|b| log_integrate(&(0..r).map(|a| g[a][b].clone()).collect::<Vec<_>>())).collect::<Result<_>>()?;
    let delta = reverse_coordinates(&log_shift)?;
    for (d, m) in plus.terms() {
        if (1..n).any(|i| !m.get(i, 0).is_zero()) {
            return Err(Error::GaugeNotScalar(d.clone()));
        }
    }
    let gauge_factor = plus.entry(0, 0);
    let potential_flat = substitute(&potential, &delta)?;
    let gauge_factor_flat = substitute(&gauge_factor, &delta)?;
    Ok(MirrorData { potential, potential_flat, log_shift, delta, gauge_factor, gauge_factor_flat })
}

/// The connection in flat coordinates:
/// `Ω_â = Σ_b (δ_a^b + q̂^a∂_â δ^b) Ω̂_b(q(q̂)) + (q̂^a∂_â F)·I`.
/// Its first column is checked to be `p_a`.
pub fn flat_connection(hat: &ConnectionSet, mirror: &MirrorData, ring: &CohomologyRing) -> Result<ConnectionSet> {
    let r = ring.rank();
    let n = ring.dim();
    let cutoff = hat.cutoff().clone();
    let subst: Vec<MatrixSeries> = hat.omegas.iter().map(|om| substitute(om, &mirror.delta)).collect::<Result<_>>()?;
    let mut omegas = Vec::with_capacity(r);
    for a in 0..r {
        let mut om = MatrixSeries::new(cutoff.clone());
        for (b, sb) in subst.iter().enumerate() {
            let mut jac = mirror.delta[b].log_derivative(a);
            if a == b {
                jac = jac.add(&ScalarSeries::one(cutoff.clone()));
            }
            om = om.add(&sb.times_scalar_series(&jac));
        }
        let df = mirror.potential_flat.log_derivative(a);
        om = om.add(&df.map(|c| LMatrix::identity(n).times_scalar(c)));
        for (d, m) in om.terms() {
            let ok = (0..n).all(|i| {
                let expected = if i == a + 1 && d.is_zero() { Laurent::one() } else { Laurent::zero() };
                *m.get(i, 0) == expected
            });
            if !ok {
                return Err(Error::CompatibilityFailed { a, d: d.clone() });
            }
        }
        if om.constant_term().is_none() {
            return Err(Error::CompatibilityFailed { a, d: crate::series::Exponent::zero(r) });
        }
        omegas.push(om);
    }
    Ok(ConnectionSet { omegas })
}

/// Quantum multiplication tables in flat coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumTable {
    /// `products[a][j][k]`: coefficient of `T_k` in `p_a ∘ T_j`.
    pub products: Vec<Vec<Vec<ScalarSeries>>>,
    /// `three_point[a][j][k] = ⟨p_a ∘ T_j, T_k⟩` for the twisted pairing.
    pub three_point: Vec<Vec<Vec<ScalarSeries>>>,
}

impl QuantumTable {
    /// `⟨p_a ∘ T_j, T_k⟩ = ⟨T_j, p_a ∘ T_k⟩` for all entries.
    pub fn is_frobenius(&self) -> bool {
        self.three_point.iter().all(|t| (0..t.len()).all(|j| (0..t.len()).all(|k| t[j][k] == t[k][j])))
    }
}

pub fn quantum_products(flat: &ConnectionSet, pairing: &LMatrix) -> QuantumTable {
    let n = pairing.dim();
    let mut products = Vec::new();
    let mut three_point = Vec::new();
    for om in &flat.omegas {
        let prod: Vec<Vec<ScalarSeries>> = (0..n).map(|j| (0..n).map(|k| om.entry(k, j)).collect()).collect();
        let gm = om.left_mul_const(&pairing.transpose());
        // (Gᵀ Ω)_{kj} = Σ_i G_{ik} Ω_{ij} = ⟨p_a ∘ T_j, T_k⟩
        let tp: Vec<Vec<ScalarSeries>> = (0..n).map(|j| (0..n).map(|k| gm.entry(k, j)).collect()).collect();
        products.push(prod);
        three_point.push(tp);
    }
    QuantumTable { products, three_point }
}

/// `J_can(q̂) = f · e^{F/ħ} · e^{Σ_a δ^a p_a/ħ} · S⁻¹(1)`, all in flat
/// coordinates. Checks that `J_can = 1 + O(ħ⁻²)` away from `q̂ = 0`.
pub fn canonical_j(j_series: &VectorSeries, mirror: &MirrorData, ring: &CohomologyRing) -> Result<VectorSeries> {
    let n = ring.dim();
    let cutoff = j_series.cutoff().clone();
    let j_flat = substitute(j_series, &mirror.delta)?;
    let scalar = mirror.potential_flat.hbar_shift(-1).exp()?.mul(&mirror.gauge_factor_flat);
    let mut shift = MatrixSeries::new(cutoff.clone());
    for (a, da) in mirror.delta.iter().enumerate() {
        let p = ring.cup_matrix(a).times_scalar(&Laurent::hbar_power(-1));
        shift = shift.add(&da.map(|c| p.times_scalar(c)));
    }
    let shift = shift.exp(n)?;
    let out = shift.apply(&j_flat).times_scalar_series(&scalar);
    for (d, v) in out.terms() {
        let bad = if d.is_zero() {
            *v != crate::series::HLaurent::basis(n, 0)
        } else {
            v.comps().iter().any(|c| c.max_exponent().is_some_and(|k| k >= -1))
        };
        if bad {
            return Err(Error::AsymptoticsFailed(d.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmodule::{birkhoff_factorize, canonical_connection, connection_from_s};
    use crate::floer::FloerModel;
    use crate::render::{parse_scalar, render_scalar};
    use crate::series::Cutoff;
    use crate::toric::examples::*;
    use crate::toric::LambdaMode;

    #[test]
    fn hirzebruch_super_mirror() {
        let space = hirzebruch_super();
        let ring = CohomologyRing::build(&space).unwrap();
        let cut = Cutoff::new(alloc::vec![2, 4]);
        let fm = FloerModel::new(&space, &ring, LambdaMode::Zero);
        let sinv = fm.s_inverse_matrix(&cut).unwrap();
        let (conn, s) = connection_from_s(&sinv, &ring).unwrap();
        let pair = birkhoff_factorize(&s, ring.dim()).unwrap();
        let hat = canonical_connection(&conn, &pair, ring.dim()).unwrap();
        let m = extract_mirror(&hat, &pair.plus, &ring, &space.degree_vector()).unwrap();
        let ratio = m.forward_ratio().unwrap();
        assert_eq!(ratio[0], parse_scalar("1 - 2*q2 + q2^2", &cut).unwrap());
        assert_eq!(ratio[1], parse_scalar("1 - 2*q2 + 3*q2^2 - 4*q2^3 + 5*q2^4", &cut).unwrap());
        assert_eq!(render_scalar(&m.potential), "-2*q1*q2 - 8*q1*q2^2 - 32*q1*q2^3 - 128*q1*q2^4");
        assert_eq!(m.potential_flat, parse_scalar("-2*q1*q2", &cut).unwrap());
        assert_eq!(m.gauge_factor, parse_scalar("1 - 2*q2 - 2*q2^2 - 4*q2^3 - 10*q2^4", &cut).unwrap());
        let flat = flat_connection(&hat, &m, &ring).unwrap();
        assert!(flat.is_flat());
        let j = canonical_j(&fm.j_function(&cut).unwrap(), &m, &ring).unwrap();
        assert!(!j.is_zero());
    }
}
