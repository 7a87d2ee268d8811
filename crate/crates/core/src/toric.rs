//! Class group, the collection `Θ` of class-group elements with real image
//! in `−Z`, the effective cone, and the boundary bookkeeping relating faces
//! of the effective cone to strata.
//!
//! Only the vectors themselves are used. Conditions on a fan supported on
//! them (completeness, semiprojectivity, chamber choices) are not checked
//! and remain the caller's responsibility.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::{rank, smith_normal_form, IntMatrix, Rational};
use crate::polyhedra::{HalfOpenPolyhedron, LinearConstraint};
use crate::restrict::restrict;
use crate::strata::{enumerate_strata, Stratum};

/// `Z^k / phi(Z^n) ≅ Z^{k−r} ⊕ ⊕_i Z/d_i`.
///
/// The free coordinates are `pi · m`; torsion coordinate `i` is
/// `⟨u_i, m⟩ mod d_i` for the rows `u_i` of the left Smith transform whose
/// invariant factor exceeds 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroup {
    pub free_rank: usize,
    /// Invariant factors `d_i > 1` in divisibility order.
    pub torsion: Vec<BigInt>,
    /// All `r` nonzero invariant factors of `phi`, ones included.
    pub invariant_factors: Vec<BigInt>,
    free_rows: IntMatrix,
    torsion_rows: IntMatrix,
}

/// An element of the class group in the coordinates of [`ClassGroup`].
/// Torsion entries are reduced into `[0, d_i)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassElement {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

pub fn class_group(inst: &Instance) -> ClassGroup {
    let (d, u, _) = smith_normal_form(inst.phi());
    let r = inst.rank();
    let invariant_factors: Vec<BigInt> = (0..r).map(|i| d[(i, i)].clone()).collect();
    let torsion_idx: Vec<usize> = (0..r).filter(|&i| !invariant_factors[i].is_one()).collect();
    ClassGroup {
        free_rank: inst.codim(),
        torsion: torsion_idx.iter().map(|&i| invariant_factors[i].clone()).collect(),
        invariant_factors,
        free_rows: inst.pi().clone(),
        torsion_rows: u.select_rows(&torsion_idx),
    }
}

impl ClassGroup {
    /// Number of torsion elements.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Class of the divisor `Σ m_j D_j`.
    pub fn project(&self, m: &[BigInt]) -> ClassElement {
        assert_eq!(m.len(), self.free_rows.cols());
        let torsion = self
            .torsion_rows
            .mul_vec(m)
            .into_iter()
            .zip(&self.torsion)
            .map(|(x, d)| x.mod_floor(d))
            .collect();
        ClassElement {
            free: self.free_rows.mul_vec(m),
            torsion,
        }
    }

    pub fn add(&self, a: &ClassElement, b: &ClassElement) -> ClassElement {
        ClassElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.torsion)
                .map(|((x, y), d)| (x + y).mod_floor(d))
                .collect(),
        }
    }

    /// All torsion tuples, lexicographically.
    pub fn torsion_elements(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for d in &self.torsion {
            let mut next = Vec::new();
            for t in &out {
                let mut x = BigInt::zero();
                while &x < d {
                    let mut longer = t.clone();
                    longer.push(x.clone());
                    next.push(longer);
                    x += 1;
                }
            }
            out = next;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaElement {
    /// `−p` for the lattice point `p` of the stratum.
    pub free_part: Vec<BigInt>,
    pub torsion_part: Vec<BigInt>,
    pub stratum: Stratum,
}

/// `Θ`: one element per half-open lattice point and torsion tuple, sorted by
/// free part, then torsion part.
pub fn bondal_thomsen(inst: &Instance) -> Vec<ThetaElement> {
    theta_from_strata(inst, &enumerate_strata(inst))
}

pub fn theta_from_strata(inst: &Instance, strata: &[Stratum]) -> Vec<ThetaElement> {
    let torsion = class_group(inst).torsion_elements();
    let mut out: Vec<ThetaElement> = strata
        .iter()
        .flat_map(|s| {
            let free_part: Vec<BigInt> = s.point.p.iter().map(|x| -x).collect();
            torsion.iter().map(move |t| ThetaElement {
                free_part: free_part.clone(),
                torsion_part: t.clone(),
                stratum: s.clone(),
            })
        })
        .collect();
    out.sort_by(|a, b| (&a.free_part, &a.torsion_part).cmp(&(&b.free_part, &b.torsion_part)));
    out
}

/// Role of a generator `π(e_j)` of the effective cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorKind {
    Zero,
    /// Positive multiple of an earlier generator.
    Duplicate(usize),
    /// In the cone of the generators off its own ray.
    Redundant,
    Extremal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveCone {
    /// `π(e_1), …, π(e_k)`.
    pub generators: Vec<Vec<BigInt>>,
    pub kinds: Vec<GeneratorKind>,
    pub dim: usize,
    /// No line through the origin lies in the cone.
    pub pointed: bool,
}

impl EffectiveCone {
    pub fn extremal_rays(&self) -> Vec<&Vec<BigInt>> {
        self.generators
            .iter()
            .zip(&self.kinds)
            .filter(|(_, k)| **k == GeneratorKind::Extremal)
            .map(|(g, _)| g)
            .collect()
    }
}

fn is_positive_multiple(a: &[BigInt], b: &[BigInt]) -> bool {
    // a = t b with t > 0, for nonzero b.
    let Some(i) = b.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if a[i].is_zero() || a[i].signum() != b[i].signum() {
        return false;
    }
    a.iter().zip(b).all(|(x, y)| x * &b[i] == y * &a[i])
}

/// Whether `target` is a nonnegative combination of `gens`.
fn in_cone(gens: &[&Vec<BigInt>], target: &[BigInt]) -> bool {
    let vars = gens.len();
    let mut sys = HalfOpenPolyhedron::new(vars);
    for i in 0..vars {
        let mut e = vec![Rational::zero(); vars];
        e[i] = Rational::one();
        sys.push(LinearConstraint::ge(e, Rational::zero())).unwrap();
    }
    for (row, t) in target.iter().enumerate() {
        let coeffs = gens.iter().map(|g| Rational::from_integer(g[row].clone())).collect();
        sys.push(LinearConstraint::eq(coeffs, Rational::from_integer(t.clone()))).unwrap();
    }
    sys.is_feasible()
}

pub fn effective_cone(inst: &Instance) -> EffectiveCone {
    let generators: Vec<Vec<BigInt>> = (0..inst.k()).map(|j| inst.pi_column(j)).collect();
    let kinds = (0..generators.len())
        .map(|j| {
            let g = &generators[j];
            if g.iter().all(|x| x.is_zero()) {
                return GeneratorKind::Zero;
            }
            if let Some(i) = (0..j).find(|&i| is_positive_multiple(g, &generators[i])) {
                return GeneratorKind::Duplicate(i);
            }
            let others: Vec<&Vec<BigInt>> = generators
                .iter()
                .filter(|h| !h.iter().all(|x| x.is_zero()) && !is_positive_multiple(h, g))
                .collect();
            if in_cone(&others, g) {
                GeneratorKind::Redundant
            } else {
                GeneratorKind::Extremal
            }
        })
        .collect();
    EffectiveCone {
        dim: rank(inst.pi()),
        pointed: is_pointed(&generators),
        generators,
        kinds,
    }
}

/// Pointed iff no `x ≥ 0` supported on the nonzero generators with
/// `Σ x_j = 1` has `Σ x_j g_j = 0`.
fn is_pointed(generators: &[Vec<BigInt>]) -> bool {
    let nonzero: Vec<&Vec<BigInt>> = generators.iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
    if nonzero.is_empty() {
        return true;
    }
    let vars = nonzero.len();
    let dim = nonzero[0].len();
    let mut sys = HalfOpenPolyhedron::new(vars);
    for i in 0..vars {
        let mut e = vec![Rational::zero(); vars];
        e[i] = Rational::one();
        sys.push(LinearConstraint::ge(e, Rational::zero())).unwrap();
    }
    sys.push(LinearConstraint::eq(vec![Rational::one(); vars], Rational::one())).unwrap();
    for row in 0..dim {
        let coeffs = nonzero.iter().map(|g| Rational::from_integer(g[row].clone())).collect();
        sys.push(LinearConstraint::eq(coeffs, Rational::zero())).unwrap();
    }
    !sys.is_feasible()
}

/// The face of the effective cone spanned by `π(e_j)`, `j ∉ J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveConeFace {
    pub zero_set: BTreeSet<usize>,
    /// Indices `j ∉ J`, ascending.
    pub generators: Vec<usize>,
    pub vectors: Vec<Vec<BigInt>>,
    pub dim: usize,
}

impl EffectiveConeFace {
    pub fn from_zero_set(inst: &Instance, zero_set: &BTreeSet<usize>) -> Self {
        let generators: Vec<usize> = (0..inst.k()).filter(|j| !zero_set.contains(j)).collect();
        let vectors = generators.iter().map(|&j| inst.pi_column(j)).collect();
        EffectiveConeFace {
            zero_set: zero_set.clone(),
            dim: inst.pi_rank_outside(zero_set),
            generators,
            vectors,
        }
    }

    /// Whether `q` lies in the linear span of the face. For `q` in the cone
    /// this is membership in the face itself.
    pub fn spans(&self, q: &[BigInt]) -> bool {
        if self.vectors.is_empty() {
            return q.iter().all(|x| x.is_zero());
        }
        let cols = q.len();
        let span = IntMatrix::from_rows(self.vectors.clone(), cols);
        let with_q = span.vstack(&IntMatrix::from_rows(vec![q.to_vec()], cols));
        rank(&with_q) == self.dim
    }
}

/// Minimal face `τ` of the effective cone containing a half-open lattice
/// point `p`, read off from the zero set of its cube fiber.
pub fn minimal_eff_face(inst: &Instance, p: &[BigInt]) -> Result<EffectiveConeFace> {
    let zeros = inst.fiber_zero_set(p)?;
    Ok(EffectiveConeFace::from_zero_set(inst, &zeros))
}

/// Per-element check of `dim τ + lift_dim = k − |J|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryRecord {
    /// Index into the sorted `Θ`.
    pub theta: usize,
    pub point: Vec<BigInt>,
    pub zero_set: BTreeSet<usize>,
    pub tau_dim: usize,
    pub lift_dim: usize,
    pub identity_holds: bool,
    /// `τ` and the zonotope face have the same dimension.
    pub face_dim_matches: bool,
}

/// Elements of `Θ` on one face `τ`, compared with the strata above the
/// face and with `Θ` of the restricted instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceGrouping {
    pub zero_set: BTreeSet<usize>,
    pub tau_dim: usize,
    /// Distinct free parts of `Θ` elements whose point lies on `τ`.
    pub free_parts_on_face: usize,
    /// Same, counting every torsion tuple.
    pub theta_on_face: usize,
    /// Strata whose zero set contains `J`.
    pub strata_above: usize,
    /// Half-open lattice points of the restricted instance.
    pub restricted_points: usize,
    /// `|Θ|` of the restricted instance, torsion included.
    pub restricted_theta: usize,
}

impl FaceGrouping {
    pub fn passes(&self) -> bool {
        self.free_parts_on_face == self.strata_above && self.strata_above == self.restricted_points
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryReport {
    pub theta_count: usize,
    pub records: Vec<CorollaryRecord>,
    /// One entry per distinct zero set, ordered by zero set.
    pub groupings: Vec<FaceGrouping>,
}

impl CorollaryReport {
    pub fn identities_hold(&self) -> bool {
        self.records.iter().all(|r| r.identity_holds && r.face_dim_matches)
    }

    pub fn groupings_hold(&self) -> bool {
        self.groupings.iter().all(FaceGrouping::passes)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in self.records.iter().filter(|r| !(r.identity_holds && r.face_dim_matches)) {
            out.push(format!(
                "theta {} at {:?}: dim tau {} + lift {} vs k - |J| with J = {:?} (face dims agree: {})",
                r.theta, r.point, r.tau_dim, r.lift_dim, r.zero_set, r.face_dim_matches
            ));
        }
        for g in self.groupings.iter().filter(|g| !g.passes()) {
            out.push(format!(
                "face {:?}: {} points on tau, {} strata above, {} restricted points",
                g.zero_set, g.free_parts_on_face, g.strata_above, g.restricted_points
            ));
        }
        out
    }

    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Evaluates both statements for a full-rank instance without failing on
/// mismatches.
pub fn corollary_report(inst: &Instance) -> Result<CorollaryReport> {
    if !inst.is_full_rank() {
        return Err(Error::RankDeficient {
            rank: inst.rank(),
            ambient: inst.n(),
        });
    }
    let strata = enumerate_strata(inst);
    corollary_report_from(inst, &strata)
}

/// As [`corollary_report`], reusing already enumerated strata.
pub fn corollary_report_from(inst: &Instance, strata: &[Stratum]) -> Result<CorollaryReport> {
    if !inst.is_full_rank() {
        return Err(Error::RankDeficient {
            rank: inst.rank(),
            ambient: inst.n(),
        });
    }
    let theta = theta_from_strata(inst, strata);
    let k = inst.k();

    let faces: BTreeMap<Vec<BigInt>, EffectiveConeFace> = strata
        .par_iter()
        .map(|s| Ok((s.point.p.clone(), minimal_eff_face(inst, &s.point.p)?)))
        .collect::<Result<_>>()?;
    let records = theta
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let s = &t.stratum;
            let tau = &faces[&s.point.p];
            CorollaryRecord {
                theta: i,
                point: s.point.p.clone(),
                zero_set: s.zero_set.clone(),
                tau_dim: tau.dim,
                lift_dim: s.lift_dim,
                identity_holds: tau.dim + s.lift_dim == k - s.zero_set.len(),
                face_dim_matches: tau.dim == inst.face_dimension_from_vectors(&s.zero_set),
            }
        })
        .collect();

    let mut representatives: BTreeMap<&BTreeSet<usize>, &Stratum> = BTreeMap::new();
    for s in strata {
        representatives.entry(&s.zero_set).or_insert(s);
    }
    let groupings = representatives
        .into_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(zeros, s)| {
            let tau = EffectiveConeFace::from_zero_set(inst, zeros);
            let on_face: Vec<&ThetaElement> = theta.iter().filter(|t| tau.spans(&t.stratum.point.p)).collect();
            let free_parts: BTreeSet<&Vec<BigInt>> = on_face.iter().map(|t| &t.free_part).collect();
            let sub = restrict(inst, s).sub;
            let restricted_points = sub.half_open_lattice_points().len();
            let restricted_torsion: usize = class_group(&sub)
                .torsion_order()
                .try_into()
                .expect("torsion order fits in usize");
            FaceGrouping {
                zero_set: zeros.clone(),
                tau_dim: tau.dim,
                free_parts_on_face: free_parts.len(),
                theta_on_face: on_face.len(),
                strata_above: strata.iter().filter(|t| zeros.is_subset(&t.zero_set)).count(),
                restricted_points,
                restricted_theta: restricted_points * restricted_torsion,
            }
        })
        .collect();

    Ok(CorollaryReport {
        theta_count: theta.len(),
        records,
        groupings,
    })
}

/// [`corollary_report`], failing with the problems found.
pub fn verify_corollary(inst: &Instance) -> Result<CorollaryReport> {
    let report = corollary_report(inst)?;
    let failures = report.failures();
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(Error::VerificationFailure(failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;

    fn inst(v: &[Vec<i64>]) -> Instance {
        Instance::from_i64(v).unwrap()
    }

    fn hirzebruch() -> Instance {
        inst(&[vec![1, 0], vec![0, 1], vec![-1, 2], vec![0, -1]])
    }

    #[test]
    fn class_groups() {
        let g = class_group(&hirzebruch());
        assert_eq!((g.free_rank, g.torsion.len()), (2, 0));

        let g = class_group(&inst(&[vec![2]]));
        assert_eq!(g.free_rank, 0);
        assert_eq!(g.torsion, int_vec(&[2]));

        let g = class_group(&inst(&[vec![1, 1], vec![1, -1]]));
        assert_eq!(g.free_rank, 0);
        assert_eq!(g.torsion, int_vec(&[2]));
        assert_eq!(g.torsion_elements(), vec![int_vec(&[0]), int_vec(&[1])]);
    }

    #[test]
    fn class_map_kills_principal_divisors() {
        for i in [hirzebruch(), inst(&[vec![2]]), inst(&[vec![1, 1], vec![1, -1]]), inst(&[vec![2, 0], vec![0, 3], vec![1, 1]])] {
            let g = class_group(&i);
            for u in 0..i.n() {
                let mut e = vec![BigInt::zero(); i.n()];
                e[u] = BigInt::one();
                let image = i.phi().mul_vec(&e);
                let c = g.project(&image);
                assert!(c.free.iter().all(Zero::is_zero));
                assert!(c.torsion.iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn generator_of_torsion() {
        // Z / 2Z: the single divisor class is the generator.
        let i = inst(&[vec![2]]);
        let g = class_group(&i);
        assert_eq!(g.project(&int_vec(&[1])).torsion, int_vec(&[1]));
        assert_eq!(g.project(&int_vec(&[3])).torsion, int_vec(&[1]));
    }

    #[test]
    fn theta_counts() {
        assert_eq!(bondal_thomsen(&hirzebruch()).len(), 5);
        let t = bondal_thomsen(&inst(&[vec![2]]));
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|e| e.free_part.is_empty()));
        let t = bondal_thomsen(&inst(&[vec![1, 1], vec![1, -1]]));
        assert_eq!(t.len(), 2);
        assert_eq!(enumerate_strata(&inst(&[vec![1, 1], vec![1, -1]])).len(), 1);
    }

    #[test]
    fn effective_cones() {
        let c = effective_cone(&inst(&[vec![1], vec![-1]]));
        assert_eq!(c.dim, 1);
        assert!(c.pointed);
        assert_eq!(c.kinds[1], GeneratorKind::Duplicate(0));
        assert_eq!(c.extremal_rays().len(), 1);

        let c = effective_cone(&inst(&[vec![1]]));
        assert_eq!((c.dim, c.generators[0].len()), (0, 0));
        assert_eq!(c.kinds, vec![GeneratorKind::Zero]);

        let c = effective_cone(&hirzebruch());
        assert!(c.pointed);
        assert_eq!(c.dim, 2);
        assert_eq!(c.extremal_rays().len(), 2);
        assert_eq!(c.kinds.iter().filter(|k| matches!(k, GeneratorKind::Duplicate(_))).count(), 1);
        assert_eq!(c.kinds.iter().filter(|k| **k == GeneratorKind::Redundant).count(), 1);
    }

    #[test]
    fn minimal_faces() {
        let i = hirzebruch();
        let strata = enumerate_strata(&i);
        let by_zeros = |z: &[usize]| {
            let z: BTreeSet<usize> = z.iter().copied().collect();
            strata.iter().find(|s| s.zero_set == z).unwrap().point.p.clone()
        };
        let red = minimal_eff_face(&i, &by_zeros(&[1, 3])).unwrap();
        assert_eq!((red.generators.clone(), red.dim), (vec![0, 2], 1));
        assert_eq!(red.vectors[0], red.vectors[1]);
        let black = minimal_eff_face(&i, &by_zeros(&[0, 1, 2, 3])).unwrap();
        assert_eq!(black.dim, 0);
        let open = minimal_eff_face(&i, &by_zeros(&[])).unwrap();
        assert_eq!(open.dim, 2);
    }

    #[test]
    fn corollary_on_hirzebruch() {
        let report = verify_corollary(&hirzebruch()).unwrap();
        assert_eq!(report.theta_count, 5);
        let zeros: BTreeSet<usize> = [1, 3].into_iter().collect();
        let red = report.groupings.iter().find(|g| g.zero_set == zeros).unwrap();
        assert_eq!((red.free_parts_on_face, red.restricted_points), (2, 2));
        let r = report.records.iter().find(|r| r.zero_set == zeros).unwrap();
        assert_eq!((r.tau_dim, r.lift_dim), (1, 1));
    }

    #[test]
    fn corollary_needs_full_rank() {
        assert!(matches!(
            corollary_report(&inst(&[vec![1, 0], vec![-1, 0]])),
            Err(Error::RankDeficient { rank: 1, ambient: 2 })
        ));
    }
}
