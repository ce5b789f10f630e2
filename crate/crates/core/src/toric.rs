//! Smooth complete fans, Gale-dual bases and the bundle data of a toric
//! superspace.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::arith::{integer, linalg, rat, Rational};
use crate::error::{Error, Result};

/// One named invariant and its outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportEntry {
    pub name: &'static str,
    pub outcome: core::result::Result<(), Error>,
}

/// Outcome of a validation pass, one entry per invariant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
}

impl Report {
    fn push(&mut self, name: &'static str, outcome: core::result::Result<(), Error>) {
        self.entries.push(ReportEntry { name, outcome });
    }

    pub fn is_pass(&self) -> bool {
        self.entries.iter().all(|e| e.outcome.is_ok())
    }

    pub fn first_error(&self) -> Option<&Error> {
        self.entries.iter().find_map(|e| e.outcome.as_ref().err())
    }

    pub fn into_result(self) -> Result<()> {
        match self.first_error() {
            Some(e) => Err(e.clone()),
            None => Ok(()),
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }
}

fn check_primitive(rays: &[Vec<i64>]) -> Result<()> {
    for (i, ray) in rays.iter().enumerate() {
        let g = ray.iter().fold(0i128, |g, &x| integer::gcd(g, x as i128));
        if g != 1 {
            return Err(Error::NonPrimitiveRay(i));
        }
    }
    Ok(())
}

fn check_smooth(rays: &[Vec<i64>], cones: &[Vec<usize>]) -> Result<()> {
    for cone in cones {
        let m: Vec<Vec<i64>> = cone.iter().map(|&i| rays[i].clone()).collect();
        if integer::det(&m).abs() != 1 {
            return Err(Error::NotSmooth(cone.clone()));
        }
    }
    Ok(())
}

fn check_complete(cones: &[Vec<usize>]) -> Result<()> {
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for cone in cones {
        for skip in 0..cone.len() {
            let mut f: Vec<usize> = cone.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| i).collect();
            f.sort_unstable();
            facets.push(f);
        }
    }
    facets.sort();
    facets.dedup();
    for facet in facets {
        let count = cones.iter().filter(|c| facet.iter().all(|i| c.contains(i))).count();
        if count != 2 {
            return Err(Error::NotComplete(facet));
        }
    }
    Ok(())
}

fn check_fan_shape(rays: &[Vec<i64>], cones: &[Vec<usize>]) -> Result<usize> {
    let n = rays.first().map_or(0, |r| r.len());
    if n == 0 {
        return Err(Error::DimensionMismatch("no rays".into()));
    }
    if rays.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("rays of different lengths".into()));
    }
    if cones.is_empty() {
        return Err(Error::DimensionMismatch("no maximal cones".into()));
    }
    for cone in cones {
        if cone.len() != n {
            return Err(Error::DimensionMismatch(format!("maximal cone with {} rays in dimension {n}", cone.len())));
        }
        if cone.iter().any(|&i| i >= rays.len()) {
            return Err(Error::DimensionMismatch("cone refers to a missing ray".into()));
        }
    }
    Ok(n)
}

/// Checks that the fan is made of primitive rays, smooth and complete.
///
/// Completeness is tested combinatorially: every codimension-one face of a
/// maximal cone must lie in exactly two maximal cones.
pub fn validate_fan(rays: &[Vec<i64>], max_cones: &[Vec<usize>]) -> Report {
    let mut report = Report::default();
    if let Err(e) = check_fan_shape(rays, max_cones) {
        report.push("shape", Err(e));
        return report;
    }
    report.push("primitive rays", check_primitive(rays));
    report.push("smooth cones", check_smooth(rays, max_cones));
    report.push("complete fan", check_complete(max_cones));
    report
}

fn check_gale(rays: &[Vec<i64>], m: &[Vec<i64>]) -> Result<()> {
    let n = rays[0].len();
    let r = m[0].len();
    for a in 0..r {
        for k in 0..n {
            let s: i64 = (0..rays.len()).map(|i| m[i][a] * rays[i][k]).sum();
            if s != 0 {
                return Err(Error::NotGaleDual);
            }
        }
    }
    let q: Vec<Vec<Rational>> = m.iter().map(|row| row.iter().map(|&x| rat(x)).collect()).collect();
    if linalg::rank(&q) != r {
        return Err(Error::NotGaleDual);
    }
    Ok(())
}

fn check_surjective(m: &[Vec<i64>]) -> Result<()> {
    let r = m[0].len();
    let inv = integer::smith_invariants(m);
    if inv.len() != r || inv.iter().any(|&x| x != 1) {
        return Err(Error::NotSurjectiveOverZ);
    }
    Ok(())
}

/// Each basis vector must be a nonnegative combination of the `m_i` with
/// `i` outside every maximal cone.
fn check_nef(m: &[Vec<i64>], cones: &[Vec<usize>]) -> Result<()> {
    let r = m[0].len();
    for cone in cones {
        let outside: Vec<usize> = (0..m.len()).filter(|i| !cone.contains(i)).collect();
        // columns of the system are the m_i for i outside the cone
        let a: Vec<Vec<Rational>> = (0..r).map(|row| outside.iter().map(|&i| rat(m[i][row])).collect()).collect();
        for basis in 0..r {
            let e: Vec<Rational> = (0..r).map(|k| if k == basis { rat(1) } else { rat(0) }).collect();
            let c = linalg::solve(&a, &e).ok_or_else(|| Error::BasisNotNef { a: basis, cone: cone.clone() })?;
            if c.iter().any(|x| x < &Rational::zero()) {
                return Err(Error::BasisNotNef { a: basis, cone: cone.clone() });
            }
        }
    }
    Ok(())
}

/// Checks that `m` (one row per ray) is Gale dual to the rays, surjective
/// over `ℤ`, and that its columns form a nef basis.
pub fn validate_gale(rays: &[Vec<i64>], max_cones: &[Vec<usize>], m: &[Vec<i64>]) -> Report {
    let mut report = Report::default();
    let n = rays.first().map_or(0, |r| r.len());
    let r = m.first().map_or(0, |row| row.len());
    if m.len() != rays.len() || m.iter().any(|row| row.len() != r) || r + n != rays.len() {
        report.push(
            "shape",
            Err(Error::DimensionMismatch(format!(
                "basis matrix must be {} x {}",
                rays.len(),
                rays.len().saturating_sub(n)
            ))),
        );
        return report;
    }
    if r == 0 {
        report.push("shape", Err(Error::DimensionMismatch("empty basis".into())));
        return report;
    }
    let gale = check_gale(rays, m);
    let gale_ok = gale.is_ok();
    report.push("gale dual", gale);
    if !gale_ok {
        return report;
    }
    report.push("surjective over Z", check_surjective(m));
    report.push("nef basis", check_nef(m, max_cones));
    report
}

/// Minimal sets of rays that do not span a cone, as sorted index lists.
pub fn minimal_nonfaces(num_rays: usize, max_cones: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let cone_masks: Vec<u64> = max_cones.iter().map(|c| c.iter().fold(0u64, |m, &i| m | (1 << i))).collect();
    let is_face = |s: u64| cone_masks.iter().any(|&c| s & c == s);
    let mut out: Vec<u64> = Vec::new();
    let mut masks: Vec<u64> = (1u64..(1 << num_rays)).collect();
    masks.sort_by_key(|s| (s.count_ones(), *s));
    for s in masks {
        if is_face(s) || out.iter().any(|&t| (t & s) == t) {
            continue;
        }
        out.push(s);
    }
    out.into_iter().map(|s| (0..num_rays).filter(|&i| s & (1 << i) != 0).collect()).collect()
}

/// Whether the superspace has an odd vector bundle attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaMode {
    /// The fiber weight `λ` is set to zero.
    #[default]
    Zero,
    /// The fiber weight is kept as a formal variable.
    Symbolic,
}

/// A smooth complete toric variety with a nef Gale-dual basis and a split
/// bundle `⊕ O(v_j)` described by the weight vectors `l_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricSuperspace {
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    m: Vec<Vec<i64>>,
    l: Vec<Vec<i64>>,
}

impl ToricSuperspace {
    /// Validates and builds the superspace. `max_cones` holds 0-based ray
    /// indices; `m` has one row per ray and `l` one row per line bundle.
    pub fn new(rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>, m: Vec<Vec<i64>>, l: Vec<Vec<i64>>) -> Result<Self> {
        let mut report = validate_fan(&rays, &max_cones);
        if report.is_pass() {
            report.extend(validate_gale(&rays, &max_cones, &m));
        }
        report.into_result()?;
        if rays.len() > 63 {
            return Err(Error::DimensionMismatch("too many rays".into()));
        }
        let r = m[0].len();
        for (j, row) in l.iter().enumerate() {
            if row.len() != r {
                return Err(Error::DimensionMismatch(format!(
                    "bundle weight {} has length {}, expected {r}",
                    j + 1,
                    row.len()
                )));
            }
            if let Some(a) = row.iter().position(|&x| x < 0) {
                return Err(Error::NegativeBundleWeight { j, a });
            }
        }
        let mut max_cones = max_cones;
        for c in max_cones.iter_mut() {
            c.sort_unstable();
        }
        Ok(Self { rays, max_cones, m, l })
    }

    pub fn dim(&self) -> usize {
        self.rays[0].len()
    }

    /// Rank of the Picard lattice, i.e. the number of Kähler variables.
    pub fn rank(&self) -> usize {
        self.m[0].len()
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn gale(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn bundles(&self) -> &[Vec<i64>] {
        &self.l
    }

    pub fn minimal_nonfaces(&self) -> Vec<Vec<usize>> {
        minimal_nonfaces(self.num_rays(), &self.max_cones)
    }

    /// `⟨u_i, d⟩` for every ray `i`.
    pub fn ray_degrees(&self, d: &[i64]) -> Vec<i64> {
        self.m.iter().map(|row| row.iter().zip(d).map(|(x, y)| x * y).sum()).collect()
    }

    /// `⟨v_j, d⟩` for every bundle `j`.
    pub fn bundle_degrees(&self, d: &[i64]) -> Vec<i64> {
        self.l.iter().map(|row| row.iter().zip(d).map(|(x, y)| x * y).sum()).collect()
    }

    /// Homological degree of each Kähler variable `q^a`:
    /// `2(Σ_i m_i^a − Σ_j l_j^a)`.
    pub fn degree_vector(&self) -> Vec<i64> {
        (0..self.rank())
            .map(|a| {
                let s: i64 = self.m.iter().map(|row| row[a]).sum();
                let t: i64 = self.l.iter().map(|row| row[a]).sum();
                2 * (s - t)
            })
            .collect()
    }

    /// Largest number of `ħ` factors a single localization coefficient at a
    /// class inside `cutoff` can carry, used as a runaway guard.
    pub fn hbar_bound(&self, cutoff: &[u32]) -> i64 {
        let per: i64 = (0..self.rank())
            .map(|a| {
                let s: i64 = self.m.iter().map(|row| row[a].abs()).sum::<i64>()
                    + self.l.iter().map(|row| row[a].abs()).sum::<i64>();
                s * cutoff.get(a).copied().unwrap_or(0) as i64
            })
            .sum();
        self.dim() as i64 + per
    }
}

/// Standard fixtures used across tests.
pub mod examples {
    use super::*;

    pub fn projective_line() -> ToricSuperspace {
        ToricSuperspace::new(vec![vec![1], vec![-1]], vec![vec![0], vec![1]], vec![vec![1], vec![1]], vec![])
            .expect("valid fixture")
    }

    pub fn projective_plane() -> ToricSuperspace {
        ToricSuperspace::new(
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            vec![vec![1], vec![1], vec![1]],
            vec![],
        )
        .expect("valid fixture")
    }

    fn hirzebruch_fan() -> (Vec<Vec<i64>>, Vec<Vec<usize>>, Vec<Vec<i64>>) {
        (
            vec![vec![1, 0], vec![-1, -1], vec![0, 1], vec![0, -1]],
            vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
            vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![-1, 1]],
        )
    }

    /// The first Hirzebruch surface.
    pub fn hirzebruch() -> ToricSuperspace {
        let (rays, cones, m) = hirzebruch_fan();
        ToricSuperspace::new(rays, cones, m, vec![]).expect("valid fixture")
    }

    /// The first Hirzebruch surface with the odd bundle `O(2p₂)`.
    pub fn hirzebruch_super() -> ToricSuperspace {
        let (rays, cones, m) = hirzebruch_fan();
        ToricSuperspace::new(rays, cones, m, vec![vec![0, 2]]).expect("valid fixture")
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn hirzebruch_degrees() {
        assert_eq!(hirzebruch().degree_vector(), vec![2, 4]);
        assert_eq!(hirzebruch_super().degree_vector(), vec![2, 0]);
        assert_eq!(projective_plane().degree_vector(), vec![6]);
    }

    #[test]
    fn hirzebruch_nonfaces() {
        assert_eq!(hirzebruch().minimal_nonfaces(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(projective_plane().minimal_nonfaces(), vec![vec![0, 1, 2]]);
        assert_eq!(projective_line().minimal_nonfaces(), vec![vec![0, 1]]);
    }

    #[test]
    fn rejects_non_primitive_ray() {
        let rep = validate_fan(&[vec![2], vec![-1]], &[vec![0], vec![1]]);
        assert_eq!(rep.first_error(), Some(&Error::NonPrimitiveRay(0)));
    }

    #[test]
    fn rejects_singular_cone() {
        let rep = validate_fan(&[vec![1, 0], vec![1, 2], vec![-1, -1]], &[vec![0, 1], vec![1, 2], vec![2, 0]]);
        assert_eq!(rep.first_error(), Some(&Error::NotSmooth(vec![0, 1])));
    }

    #[test]
    fn rejects_incomplete_fan() {
        let rep = validate_fan(&[vec![1, 0], vec![0, 1], vec![-1, -1]], &[vec![0, 1], vec![1, 2]]);
        assert!(matches!(rep.first_error(), Some(Error::NotComplete(_))));
    }

    #[test]
    fn rejects_non_nef_basis() {
        // p₂' = u₄ is not nef on the Hirzebruch surface
        let (rays, cones, _) = (
            vec![vec![1, 0], vec![-1, -1], vec![0, 1], vec![0, -1]],
            vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
            (),
        );
        let m = vec![vec![1, 0], vec![1, 0], vec![1, 1], vec![0, 1]];
        let rep = validate_gale(&rays, &cones, &m);
        assert!(matches!(rep.first_error(), Some(Error::BasisNotNef { a: 1, .. })));
    }

    #[test]
    fn rejects_non_gale_matrix() {
        let rays = vec![vec![1, 0], vec![-1, -1], vec![0, 1], vec![0, -1]];
        let cones = vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]];
        let m = vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![1, -1]];
        let rep = validate_gale(&rays, &cones, &m);
        assert_eq!(rep.first_error(), Some(&Error::NotGaleDual));
    }

    #[test]
    fn rejects_non_surjective_basis() {
        let rep = validate_gale(&[vec![1], vec![-1]], &[vec![0], vec![1]], &[vec![2], vec![2]]);
        assert_eq!(rep.first_error(), Some(&Error::NotSurjectiveOverZ));
    }
}
