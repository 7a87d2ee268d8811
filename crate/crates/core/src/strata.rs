//! Φ-strata of the oriented toric arrangement and their correspondence with
//! lattice points of the half-open zonotope.
//!
//! A stratum is the set of points of `R^n / Λ` whose ceiling label
//! `Φ(u) = ⌈phi · u⌉` lies in a fixed coset of the image lattice. Its lift
//! for a label `m` is the half-open polyhedron `m − 1 < phi · y ≤ m`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::{integer_kernel, rank, solve_integer, Rational};

use crate::zonotope::{ZonotopeFace, ZonotopePoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    /// Canonical label modulo the image lattice.
    pub label: Vec<BigInt>,
    /// Indices `j` whose hyperplane contains the whole stratum.
    pub zero_set: BTreeSet<usize>,
    /// Affine dimension of the lift in `R^n`.
    pub lift_dim: usize,
    /// Relative-interior point of the lift; `Φ(witness) = label`.
    pub witness: Vec<Rational>,
    pub point: ZonotopePoint,
}

impl Stratum {
    /// Dimension of the image in the quotient torus `R^n / (Λ + ker phi)`.
    pub fn quotient_dim(&self, inst: &Instance) -> usize {
        self.lift_dim - (inst.n() - inst.rank())
    }
}

fn format_vec<T: ToString>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// `n − rank{v_j : j ∈ zeros}`.
pub fn stratum_dimension(inst: &Instance, zeros: &BTreeSet<usize>) -> usize {
    inst.n() - inst.rank_of(zeros)
}

fn build_stratum(inst: &Instance, label: Vec<BigInt>, point: ZonotopePoint) -> Result<Stratum> {
    Ok(build_stratum_with_dim(inst, label, point)?.0)
}

/// Also returns the affine dimension of the open fiber, computed from its
/// own implicit equalities.
fn build_stratum_with_dim(inst: &Instance, label: Vec<BigInt>, point: ZonotopePoint) -> Result<(Stratum, usize)> {
    let open = inst.label_fiber(&label, false);
    let (open_implicit, witness) = open
        .relative_interior()
        .map_err(|_| Error::EmptyFiber(format_vec(&label)))?;
    let affine_dim = inst.n() - open.normal_rank(&open_implicit);
    // The closed fiber is the closure of the (nonempty, convex) open one, so
    // both share their affine hull and their tight upper constraints. The
    // open witness is feasible for the closed system and rules out every
    // constraint it satisfies strictly.
    let implicit = inst.label_fiber(&label, true).implicit_equalities_with_hint(&witness)?;
    let zero_set: BTreeSet<usize> = implicit.into_iter().filter(|i| i % 2 == 0).map(|i| i / 2).collect();
    let lift_dim = stratum_dimension(inst, &zero_set);
    let stratum = Stratum {
        label,
        zero_set,
        lift_dim,
        witness,
        point,
    };
    Ok((stratum, affine_dim))
}

/// The stratum with label `m` (any representative of its coset).
pub fn stratum_for_label(inst: &Instance, m: &[BigInt]) -> Result<Stratum> {
    if m.len() != inst.k() {
        return Err(Error::DimensionMismatch(format!(
            "label has {} entries, expected {}",
            m.len(),
            inst.k()
        )));
    }
    let label = inst.canonicalize_label(m);
    let p = inst.project(&label);
    let preimage = solve_integer(inst.pi(), &p).expect("pi is surjective");
    let point = ZonotopePoint {
        p,
        preimage,
        in_half_open: true,
    };
    build_stratum(inst, label, point)
}

/// The stratum containing the class of `u ∈ R^n`.
pub fn stratum_from_point(inst: &Instance, u: &[Rational]) -> Result<Stratum> {
    if u.len() != inst.n() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, expected {}",
            u.len(),
            inst.n()
        )));
    }
    stratum_for_label(inst, &inst.ceiling_label(u))
}

/// All strata, one per lattice point of the half-open zonotope, ordered by
/// point coordinates.
pub fn enumerate_strata(inst: &Instance) -> Vec<Stratum> {
    strata_with_dims(inst, inst.half_open_lattice_points())
        .into_iter()
        .map(|(s, _)| s)
        .collect()
}

fn strata_with_dims(inst: &Instance, points: Vec<ZonotopePoint>) -> Vec<(Stratum, usize)> {
    points
        .into_par_iter()
        .map(|point| {
            let label = inst.canonicalize_label(&point.preimage);
            build_stratum_with_dim(inst, label, point).expect("half-open points have nonempty fibers")
        })
        .collect()
}

/// Labels of all strata found by scanning the fundamental domain of `Λ`
/// for open cells, reduced modulo the image lattice.
pub fn brute_force_strata(inst: &Instance) -> Result<Vec<Vec<BigInt>>> {
    if !inst.is_full_rank() {
        return Err(Error::RankDeficient {
            rank: inst.rank(),
            ambient: inst.n(),
        });
    }
    let canonical: BTreeSet<Vec<BigInt>> = inst
        .domain_labels(false)
        .iter()
        .map(|m| inst.canonicalize_label(m))
        .collect();
    Ok(canonical.into_iter().collect())
}

/// One stratum with its point, face and the per-stratum checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondenceRecord {
    pub stratum: Stratum,
    /// Face from the stratum-side zero set.
    pub face: ZonotopeFace,
    /// Zero set computed on the cube side from the point alone.
    pub cube_zero_set: BTreeSet<usize>,
    /// Relative-interior point of `{x ∈ [0,1)^k : pi · x = p}`.
    pub cube_witness: Vec<Rational>,
    /// `dim F_p + lift_dim = k − |J| + (n − r)`.
    pub identity_holds: bool,
    pub zero_sets_agree: bool,
    /// `ker phi` lies in the span of the lift and the affine dimension of
    /// the lift matches `lift_dim`.
    pub kernel_contained: bool,
}

impl CorrespondenceRecord {
    pub fn passes(&self) -> bool {
        self.identity_holds && self.zero_sets_agree && self.kernel_contained
    }
}

/// Result of checking that `J_a ⊆ J_b` puts the point of `b` on the face of
/// `a` with no larger dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionCheck {
    pub smaller: usize,
    pub larger: usize,
    pub face_contained: bool,
    pub dim_ordered: bool,
}

impl InclusionCheck {
    pub fn passes(&self) -> bool {
        self.face_contained && self.dim_ordered
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondenceReport {
    pub records: Vec<CorrespondenceRecord>,
    pub point_count: usize,
    /// Distinct labels and distinct points among the strata.
    pub labels_distinct: bool,
    pub points_distinct: bool,
    pub inclusion_checks: Vec<InclusionCheck>,
    /// Number of strata per `(face dim, lift dim)`.
    pub summary: BTreeMap<(usize, usize), usize>,
}

impl CorrespondenceReport {
    pub fn bijection_holds(&self) -> bool {
        self.records.len() == self.point_count && self.labels_distinct && self.points_distinct
    }

    /// Human-readable descriptions of every failed check.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.bijection_holds() {
            out.push(format!(
                "bijection: {} strata for {} points (labels distinct: {}, points distinct: {})",
                self.records.len(),
                self.point_count,
                self.labels_distinct,
                self.points_distinct
            ));
        }
        for (i, r) in self.records.iter().enumerate() {
            let label = format_vec(&r.stratum.label);
            if !r.identity_holds {
                out.push(format!("stratum {i} {label}: dimension identity fails (face {}, lift {})", r.face.dim, r.stratum.lift_dim));
            }
            if !r.zero_sets_agree {
                out.push(format!(
                    "stratum {i} {label}: zero sets differ ({:?} vs cube {:?})",
                    r.stratum.zero_set, r.cube_zero_set
                ));
            }
            if !r.kernel_contained {
                out.push(format!("stratum {i} {label}: kernel or lift dimension check fails"));
            }
        }
        for c in self.inclusion_checks.iter().filter(|c| !c.passes()) {
            out.push(format!(
                "strata {} and {}: inclusion reversal fails (contained: {}, dims ordered: {})",
                c.smaller, c.larger, c.face_contained, c.dim_ordered
            ));
        }
        out
    }

    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }
}

fn check_record(inst: &Instance, stratum: Stratum, lift_affine_dim: usize) -> CorrespondenceRecord {
    let (k, n, r) = (inst.k(), inst.n(), inst.rank());
    let face = ZonotopeFace {
        zero_set: stratum.zero_set.clone(),
        dim: inst.face_dimension(&stratum.zero_set),
    };
    let identity_holds = face.dim + stratum.lift_dim == k - stratum.zero_set.len() + (n - r);
    let (cube_zero_set, cube_witness) = inst
        .fiber_zero_set_with_witness(&stratum.point.p)
        .expect("half-open points have nonempty cube fibers");
    let zero_sets_agree = cube_zero_set == stratum.zero_set;

    // Span of the lift is {w : ⟨w, v_j⟩ = 0, j ∈ J}; adding ker phi must not
    // raise its rank.
    let rows: Vec<usize> = stratum.zero_set.iter().copied().collect();
    let span = integer_kernel(&inst.phi().select_rows(&rows));
    let stacked = span.vstack(&inst.preimage().kernel);
    let kernel_contained = rank(&stacked) == stratum.lift_dim && lift_affine_dim == stratum.lift_dim;

    CorrespondenceRecord {
        stratum,
        face,
        cube_zero_set,
        cube_witness,
        identity_holds,
        zero_sets_agree,
        kernel_contained,
    }
}

/// Runs every check of the stratum/point correspondence and collects the
/// results without failing.
pub fn correspondence_report(inst: &Instance) -> CorrespondenceReport {
    let points = inst.half_open_lattice_points();
    let point_count = points.len();
    let records: Vec<CorrespondenceRecord> = strata_with_dims(inst, points)
        .into_par_iter()
        .map(|(s, dim)| check_record(inst, s, dim))
        .collect();

    let labels: BTreeSet<&Vec<BigInt>> = records.iter().map(|r| &r.stratum.label).collect();
    let pts: BTreeSet<&Vec<BigInt>> = records.iter().map(|r| &r.stratum.point.p).collect();

    // Face membership only depends on (J_a, p_b); evaluate each pair once.
    let distinct: Vec<&BTreeSet<usize>> = records
        .iter()
        .map(|r| &r.stratum.zero_set)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let jobs: Vec<(usize, usize)> = (0..distinct.len())
        .flat_map(|a| (0..records.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| distinct[a].is_subset(&records[b].stratum.zero_set))
        .collect();
    // A valid cube witness for p_b vanishing on J_a certifies membership;
    // anything else goes through a feasibility test.
    let certified: Vec<bool> = records
        .par_iter()
        .map(|r| inst.cube_fiber(&r.stratum.point.p, true).contains(&r.cube_witness))
        .collect();
    let membership: HashMap<(usize, usize), bool> = jobs
        .into_par_iter()
        .map(|(a, b)| {
            let rb = &records[b];
            let vanishes = distinct[a].iter().all(|&j| rb.cube_witness[j] == Rational::from_integer(0.into()));
            let on_face = (certified[b] && vanishes) || inst.on_closed_face(&rb.stratum.point.p, distinct[a], None);
            ((a, b), on_face)
        })
        .collect();
    let zero_set_index: HashMap<&BTreeSet<usize>, usize> =
        distinct.iter().enumerate().map(|(i, z)| (*z, i)).collect();

    let mut inclusion_checks = Vec::new();
    for (a, ra) in records.iter().enumerate() {
        let ja = zero_set_index[&ra.stratum.zero_set];
        for (b, rb) in records.iter().enumerate() {
            if a == b || !ra.stratum.zero_set.is_subset(&rb.stratum.zero_set) {
                continue;
            }
            inclusion_checks.push(InclusionCheck {
                smaller: a,
                larger: b,
                face_contained: membership[&(ja, b)],
                dim_ordered: rb.face.dim <= ra.face.dim,
            });
        }
    }

    let mut summary = BTreeMap::new();
    for r in &records {
        *summary.entry((r.face.dim, r.stratum.lift_dim)).or_insert(0) += 1;
    }
    CorrespondenceReport {
        labels_distinct: labels.len() == records.len(),
        points_distinct: pts.len() == records.len(),
        records,
        point_count,
        inclusion_checks,
        summary,
    }
}

/// [`correspondence_report`], failing with the first problems found.
pub fn verify_main_theorem(inst: &Instance) -> Result<CorrespondenceReport> {
    let report = correspondence_report(inst);
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

    fn hirzebruch() -> Instance {
        Instance::from_i64(&[vec![1, 0], vec![0, 1], vec![-1, 2], vec![0, -1]]).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn strata_of_small_instances() {
        let mut dims: Vec<usize> = enumerate_strata(&hirzebruch()).iter().map(|s| s.lift_dim).collect();
        dims.sort();
        assert_eq!(dims, vec![0, 1, 2, 2, 2]);

        let one = enumerate_strata(&Instance::from_i64(&[vec![1]]).unwrap());
        assert_eq!(one.len(), 1);
        assert_eq!((one[0].lift_dim, one[0].zero_set.len()), (1, 0));
    }

    #[test]
    fn strata_from_points() {
        let inst = hirzebruch();
        let s = stratum_from_point(&inst, &[q(1, 2), q(0, 1)]).unwrap();
        assert_eq!(s.label, inst.canonicalize_label(&int_vec(&[1, 0, 0, 0])));
        assert_eq!(s.zero_set, set(&[1, 3]));
        let s = stratum_from_point(&inst, &[q(0, 1), q(0, 1)]).unwrap();
        assert_eq!(s.zero_set, set(&[0, 1, 2, 3]));
        assert_eq!(inst.ceiling_label(&[q(1, 3), q(1, 2)]), int_vec(&[1, 1, 1, 0]));
        let s = stratum_from_point(&inst, &[q(1, 3), q(1, 2)]).unwrap();
        assert_eq!(s.label, inst.canonicalize_label(&int_vec(&[1, 1, 1, 0])));
        assert!(s.zero_set.is_empty());
    }

    #[test]
    fn dimensions_from_zero_sets() {
        let inst = hirzebruch();
        assert_eq!(stratum_dimension(&inst, &set(&[1, 3])), 1);
        assert_eq!(stratum_dimension(&inst, &set(&[0, 1, 2, 3])), 0);
        assert_eq!(stratum_dimension(&inst, &set(&[])), 2);
    }

    #[test]
    fn main_theorem_on_examples() {
        let report = verify_main_theorem(&hirzebruch()).unwrap();
        let expected: BTreeMap<(usize, usize), usize> = [((2, 2), 3), ((1, 1), 1), ((0, 0), 1)].into();
        assert_eq!(report.summary, expected);

        let flat = Instance::from_i64(&[vec![1, 0]]).unwrap();
        let report = verify_main_theorem(&flat).unwrap();
        assert_eq!(report.records.len(), 1);
        let r = &report.records[0];
        assert_eq!((r.stratum.lift_dim, r.face.dim), (2, 0));
        assert!(r.stratum.zero_set.is_empty());
    }

    #[test]
    fn brute_force_matches() {
        for vectors in [
            vec![vec![1, 0], vec![0, 1], vec![-1, 2], vec![0, -1]],
            vec![vec![1], vec![-1]],
            vec![vec![1]],
            vec![vec![2], vec![3]],
        ] {
            let inst = Instance::from_i64(&vectors).unwrap();
            let brute = brute_force_strata(&inst).unwrap();
            let labels: BTreeSet<Vec<BigInt>> = enumerate_strata(&inst).into_iter().map(|s| s.label).collect();
            assert_eq!(brute, labels.into_iter().collect::<Vec<_>>());
        }
        assert_eq!(brute_force_strata(&Instance::from_i64(&[vec![1], vec![-1]]).unwrap()).unwrap().len(), 2);
        let flat = Instance::from_i64(&[vec![1, 0]]).unwrap();
        assert_eq!(brute_force_strata(&flat), Err(Error::RankDeficient { rank: 1, ambient: 2 }));
    }
}
