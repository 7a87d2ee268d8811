//! Restriction of an instance to the subspace spanned by a stratum.
//!
//! For a stratum with zero set `J`, the span of its lift is
//! `W = {w : ⟨w, v_j⟩ = 0, j ∈ J}`. Restricting the `v_j` with `j ∉ J` to
//! the lattice `W ∩ Z^n` gives a smaller instance whose half-open zonotope
//! maps onto the lattice points of the face of the stratum.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::{integer_kernel, solve_integer, IntMatrix};
use crate::strata::{enumerate_strata, Stratum};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionData {
    pub stratum: Stratum,
    /// Indices outside the zero set, in input order.
    pub kept: Vec<usize>,
    /// Rows form a basis of `W ∩ Z^n`.
    pub subspace_basis: IntMatrix,
    /// Vectors `(⟨b_i, v_j⟩)_i` for `j` in `kept`.
    pub sub: Instance,
    /// `(k−r) × (k'−r')` integer matrix taking sub-instance points to parent
    /// points.
    pub embedding: IntMatrix,
}

impl RestrictionData {
    pub fn embed(&self, q: &[BigInt]) -> Vec<BigInt> {
        self.embedding.mul_vec(q)
    }
}

pub fn restrict(inst: &Instance, stratum: &Stratum) -> RestrictionData {
    let zeros: Vec<usize> = stratum.zero_set.iter().copied().collect();
    let kept: Vec<usize> = (0..inst.k()).filter(|j| !stratum.zero_set.contains(j)).collect();
    let basis = integer_kernel(&inst.phi().select_rows(&zeros)); // d × n
    let d = basis.rows();
    let sub_phi = inst.phi().select_rows(&kept).mul(&basis.transpose()); // k' × d
    let sub = Instance::from_phi(sub_phi);

    // Column i is π(ι(x)) for any integer x with π̃(x) = e_i; this is well
    // defined since ι maps ker π̃ into ker π.
    let c = sub.codim();
    let mut embedding = IntMatrix::zeros(inst.codim(), c);
    for i in 0..c {
        let mut e = vec![BigInt::zero(); c];
        e[i] = BigInt::one();
        let x = solve_integer(sub.pi(), &e).expect("pi is surjective");
        let mut lifted = vec![BigInt::zero(); inst.k()];
        for (value, &j) in x.into_iter().zip(&kept) {
            lifted[j] = value;
        }
        for (row, value) in inst.project(&lifted).into_iter().enumerate() {
            embedding[(row, i)] = value;
        }
    }
    debug_assert_eq!(d, stratum.lift_dim);
    RestrictionData {
        stratum: stratum.clone(),
        kept,
        subspace_basis: basis,
        sub,
        embedding,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionReport {
    pub zero_set: BTreeSet<usize>,
    /// Half-open lattice points of the sub-instance.
    pub sub_points: Vec<Vec<BigInt>>,
    /// Their images under the embedding, in the same order.
    pub images: Vec<Vec<BigInt>>,
    /// Parent half-open points whose zero set contains the stratum's.
    pub face_points: Vec<Vec<BigInt>>,
    pub injective: bool,
    pub image_matches: bool,
}

impl RestrictionReport {
    pub fn passes(&self) -> bool {
        self.injective && self.image_matches && self.sub_points.len() == self.face_points.len()
    }
}

/// Compares the embedded sub-instance points with the face points, given the
/// full list of parent strata.
pub fn restriction_report(inst: &Instance, strata: &[Stratum], stratum: &Stratum) -> RestrictionReport {
    let data = restrict(inst, stratum);
    let sub_points: Vec<Vec<BigInt>> = data.sub.half_open_lattice_points().into_iter().map(|p| p.p).collect();
    let images: Vec<Vec<BigInt>> = sub_points.iter().map(|q| data.embed(q)).collect();
    let face_points: Vec<Vec<BigInt>> = strata
        .iter()
        .filter(|s| stratum.zero_set.is_subset(&s.zero_set))
        .map(|s| s.point.p.clone())
        .collect();
    let image_set: BTreeSet<&Vec<BigInt>> = images.iter().collect();
    let face_set: BTreeSet<&Vec<BigInt>> = face_points.iter().collect();
    RestrictionReport {
        zero_set: stratum.zero_set.clone(),
        injective: image_set.len() == images.len(),
        image_matches: image_set == face_set,
        sub_points,
        images,
        face_points,
    }
}

/// One report per distinct zero set among `strata`, in order of first
/// appearance. The restriction only depends on the zero set.
pub fn restriction_reports(inst: &Instance, strata: &[Stratum]) -> Vec<RestrictionReport> {
    let mut seen = BTreeSet::new();
    let representatives: Vec<&Stratum> = strata.iter().filter(|s| seen.insert(s.zero_set.clone())).collect();
    representatives
        .into_par_iter()
        .map(|s| restriction_report(inst, strata, s))
        .collect()
}

pub fn verify_restriction(inst: &Instance, stratum: &Stratum) -> Result<RestrictionReport> {
    let strata = enumerate_strata(inst);
    let report = restriction_report(inst, &strata, stratum);
    if report.passes() {
        Ok(report)
    } else {
        Err(Error::VerificationFailure(format!(
            "restriction to zero set {:?}: {} sub-instance points, {} face points, injective {}, images match {}",
            report.zero_set,
            report.sub_points.len(),
            report.face_points.len(),
            report.injective,
            report.image_matches
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;

    fn hirzebruch() -> Instance {
        Instance::from_i64(&[vec![1, 0], vec![0, 1], vec![-1, 2], vec![0, -1]]).unwrap()
    }

    fn with_zero_set(strata: &[Stratum], zeros: &[usize]) -> Stratum {
        let zeros: BTreeSet<usize> = zeros.iter().copied().collect();
        strata.iter().find(|s| s.zero_set == zeros).unwrap().clone()
    }

    #[test]
    fn edge_restriction() {
        let inst = hirzebruch();
        let strata = enumerate_strata(&inst);
        let red = with_zero_set(&strata, &[1, 3]);
        let data = restrict(&inst, &red);
        let v: Vec<BigInt> = data.sub.vectors().into_iter().map(|v| v[0].clone()).collect();
        assert!(v == int_vec(&[1, -1]) || v == int_vec(&[-1, 1]));
        let report = verify_restriction(&inst, &red).unwrap();
        assert_eq!(report.sub_points.len(), 2);
        assert!(report.face_points.contains(&red.point.p));
        assert!(report.face_points.contains(&int_vec(&[0, 0])));
    }

    #[test]
    fn trivial_restrictions() {
        let inst = hirzebruch();
        let strata = enumerate_strata(&inst);
        let open = with_zero_set(&strata, &[]);
        let data = restrict(&inst, &open);
        assert_eq!(data.sub, inst);
        assert_eq!(data.embedding, IntMatrix::identity(2));
        assert!(verify_restriction(&inst, &open).is_ok());

        let vertex = with_zero_set(&strata, &[0, 1, 2, 3]);
        let data = restrict(&inst, &vertex);
        assert_eq!((data.sub.k(), data.sub.n()), (0, 0));
        let report = verify_restriction(&inst, &vertex).unwrap();
        assert_eq!(report.images, vec![int_vec(&[0, 0])]);
    }
}
