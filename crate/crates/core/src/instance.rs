use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    determinant, hermite_normal_form, echelon_rank, image_saturation_lattice, int_vec, phi_preimage_lattice,
    rank, saturation_cokernel, solve_integer, IntMatrix, PreimageLattice, Rational,
};
use crate::polyhedra::{HalfOpenPolyhedron, Interval, LinearConstraint};

/// A finite ordered list of integer vectors `v_1, …, v_k` in `Z^n` together
/// with the derived maps.
///
/// * `phi` is the `k × n` matrix with rows `v_j`, i.e. `u ↦ (⟨u, v_j⟩)_j`.
/// * `pi` is the `(k−r) × k` cokernel presentation (Hermite form); it maps
///   `Z^k` onto `Z^{k−r}` and `pi · phi = 0`.
/// * `image_lattice` is the saturated lattice `colspace_R(phi) ∩ Z^k`
///   (Hermite basis), which labels differ by inside one stratum.
/// * `preimage` describes `Λ = {u : phi·u ∈ Z^k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    phi: IntMatrix,
    rank: usize,
    pi: IntMatrix,
    image_lattice: IntMatrix,
    preimage: PreimageLattice,
}

impl Instance {
    /// Builds an instance from at least one vector, all of the same length.
    pub fn new(vectors: Vec<Vec<BigInt>>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::EmptyInstance);
        };
        let n = first.len();
        if let Some((j, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "vector {} has length {}, expected {}",
                j + 1,
                v.len(),
                n
            )));
        }
        Ok(Self::from_phi(IntMatrix::from_rows(vectors, n)))
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(vectors: &[Vec<i64>]) -> Result<Self> {
        Self::new(vectors.iter().map(|v| int_vec(v)).collect())
    }

    /// Builds an instance directly from its `k × n` matrix. Unlike
    /// [`Instance::new`] this accepts `k = 0` and `n = 0`, which arise for
    /// restrictions to vertex faces.
    pub fn from_phi(phi: IntMatrix) -> Self {
        let rank = rank(&phi);
        let pi = saturation_cokernel(&phi);
        let image_lattice = image_saturation_lattice(&phi);
        let preimage = phi_preimage_lattice(&phi);
        debug_assert!(pi.mul(&phi).is_zero());
        debug_assert_eq!(pi.rows(), phi.rows() - rank);
        Instance {
            phi,
            rank,
            pi,
            image_lattice,
            preimage,
        }
    }

    /// Number of vectors.
    pub fn k(&self) -> usize {
        self.phi.rows()
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.phi.cols()
    }

    /// Rank of the vector configuration.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension `k − r` of the space the zonotope lives in.
    pub fn codim(&self) -> usize {
        self.k() - self.rank
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.n()
    }

    pub fn phi(&self) -> &IntMatrix {
        &self.phi
    }

    pub fn vector(&self, j: usize) -> &[BigInt] {
        self.phi.row(j)
    }

    pub fn vectors(&self) -> Vec<Vec<BigInt>> {
        self.phi.to_rows()
    }

    pub fn pi(&self) -> &IntMatrix {
        &self.pi
    }

    /// Image `π(e_j)` of the `j`-th standard basis vector.
    pub fn pi_column(&self, j: usize) -> Vec<BigInt> {
        self.pi.column(j)
    }

    pub fn image_lattice(&self) -> &IntMatrix {
        &self.image_lattice
    }

    pub fn preimage(&self) -> &PreimageLattice {
        &self.preimage
    }

    /// Rank of `{v_j : j ∈ indices}`.
    pub fn rank_of(&self, indices: &BTreeSet<usize>) -> usize {
        rank(&self.phi.select_rows(&indices.iter().copied().collect::<Vec<_>>()))
    }

    /// Rank of the columns of `pi` outside `indices`.
    pub fn pi_rank_outside(&self, indices: &BTreeSet<usize>) -> usize {
        let cols: Vec<usize> = (0..self.k()).filter(|j| !indices.contains(j)).collect();
        rank(&self.pi.select_cols(&cols))
    }

    /// `π(m)` for `m ∈ Z^k`.
    pub fn project(&self, m: &[BigInt]) -> Vec<BigInt> {
        self.pi.mul_vec(m)
    }

    /// Unique representative of `m` modulo the image lattice: each pivot
    /// coordinate of the Hermite basis is reduced into `[0, pivot)`.
    pub fn canonicalize_label(&self, m: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(m.len(), self.k());
        let mut out = m.to_vec();
        let basis = &self.image_lattice;
        for i in 0..basis.rows() {
            let row = basis.row(i);
            let c = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            let q = out[c].div_floor(&row[c]);
            if q.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(row) {
                *o -= &q * b;
            }
        }
        out
    }

    /// The system `m_j − 1 < ⟨y, v_j⟩ ≤ m_j` (or `≤` on both sides when
    /// `closed`). Constraint `2j` is the upper bound for `v_j`, `2j + 1` the
    /// lower one.
    pub fn label_fiber(&self, m: &[BigInt], closed: bool) -> HalfOpenPolyhedron {
        assert_eq!(m.len(), self.k());
        let mut sys = HalfOpenPolyhedron::new(self.n());
        for (j, mj) in m.iter().enumerate() {
            let v: Vec<Rational> = self.vector(j).iter().map(|x| Rational::from_integer(x.clone())).collect();
            let upper = Rational::from_integer(mj.clone());
            let lower = &upper - Rational::from_integer(1.into());
            sys.push(LinearConstraint::le(v.clone(), upper)).expect("dimensions agree");
            let lower = if closed {
                LinearConstraint::ge(v, lower)
            } else {
                LinearConstraint::gt(v, lower)
            };
            sys.push(lower).expect("dimensions agree");
        }
        sys
    }

    /// `Φ(u) = ⌈phi · u⌉`, componentwise.
    pub fn ceiling_label(&self, u: &[Rational]) -> Vec<BigInt> {
        assert_eq!(u.len(), self.n());
        (0..self.k())
            .map(|j| {
                let s: Rational = self
                    .vector(j)
                    .iter()
                    .zip(u)
                    .fold(Rational::zero(), |acc, (a, b)| acc + Rational::from_integer(a.clone()) * b);
                s.ceil().to_integer()
            })
            .collect()
    }

    /// Labels `m` realized on the fundamental domain of `Λ`: those for which
    /// `m − 1 < phi · y ≤ m` (or `≤` on both sides when `closed`) has a
    /// solution `y = Σ t_i b_i` with `t ∈ [0,1)^r`, where the `b_i` form the
    /// basis of `Λ` modulo `ker phi`.
    ///
    /// Every coset of labels with a nonempty fiber meets this set, since
    /// translating a fiber by `λ ∈ Λ` shifts its label by `phi · λ`. Labels are
    /// fixed one coordinate at a time; the exact range of `⟨y, v_j⟩` over the
    /// current cell decides which values of `m_j` remain possible.
    pub fn domain_labels(&self, closed: bool) -> Vec<Vec<BigInt>> {
        let basis = &self.preimage.basis;
        let r = basis.rows();
        let weights: Vec<Vec<Rational>> = (0..self.k())
            .map(|j| {
                let v: Vec<Rational> = self.vector(j).iter().map(|x| Rational::from_integer(x.clone())).collect();
                basis.mul_vec(&v)
            })
            .collect();
        let mut domain = HalfOpenPolyhedron::new(r);
        for i in 0..r {
            let mut e = vec![Rational::zero(); r];
            e[i] = Rational::one();
            domain.push(LinearConstraint::ge(e.clone(), Rational::zero())).unwrap();
            domain.push(LinearConstraint::lt(e, Rational::one())).unwrap();
        }
        if self.k() == 0 {
            return vec![Vec::new()];
        }
        let first = label_candidates(&domain, &weights[0], closed);
        first
            .into_par_iter()
            .flat_map_iter(|(m0, cell)| {
                let mut out = Vec::new();
                extend_label(&weights, closed, cell, vec![m0], &mut out);
                out
            })
            .collect()
    }

    /// The unimodular `T` with `other = T · pi`, for another presentation
    /// `other` of the cokernel. Fails unless `other` has `k − r` rows,
    /// annihilates `phi` and maps `Z^k` onto `Z^{k−r}`.
    pub fn presentation_change(&self, other: &IntMatrix) -> Result<IntMatrix> {
        let c = self.codim();
        if other.rows() != c || other.cols() != self.k() {
            return Err(Error::DimensionMismatch(format!(
                "presentation is {}x{}, expected {}x{}",
                other.rows(),
                other.cols(),
                c,
                self.k()
            )));
        }
        if !other.mul(&self.phi).is_zero() {
            return Err(Error::InvalidPresentation("matrix does not annihilate the vectors".into()));
        }
        let mut t = IntMatrix::zeros(c, c);
        for i in 0..c {
            let mut e = vec![BigInt::zero(); c];
            e[i] = BigInt::one();
            let x = solve_integer(&self.pi, &e).expect("pi is surjective");
            for (row, value) in other.mul_vec(&x).into_iter().enumerate() {
                t[(row, i)] = value;
            }
        }
        if !determinant(&t).abs().is_one() {
            return Err(Error::InvalidPresentation(
                "matrix is not unimodularly equivalent to the canonical projection".into(),
            ));
        }
        debug_assert_eq!(&t.mul(&self.pi), other);
        Ok(t)
    }

    /// An equivalent full-rank instance obtained by quotienting `Z^n` by
    /// `ker phi ∩ Z^n`. Labels, `pi` and the image lattice are unchanged.
    pub fn full_rank_reduction(&self) -> Instance {
        // U · phiᵀ = H; the first r rows of H, transposed, express phi in a
        // basis of Z^n adapted to the kernel.
        let (h, _) = hermite_normal_form(&self.phi.transpose());
        let r = echelon_rank(&h);
        Instance::from_phi(h.select_rows(&(0..r).collect::<Vec<_>>()).transpose())
    }
}

/// Values of `m_j` whose slab meets the cell, each with the refined cell.
fn label_candidates(cell: &HalfOpenPolyhedron, w: &[Rational], closed: bool) -> Vec<(BigInt, HalfOpenPolyhedron)> {
    let Some(range) = cell.range(w) else {
        return Vec::new();
    };
    let (lo, hi) = match (&range.lower, &range.upper) {
        (Some(l), Some(u)) => (l.value.floor().to_integer(), u.value.ceil().to_integer() + 1),
        _ => unreachable!("the fundamental domain is bounded"),
    };
    let mut out = Vec::new();
    let mut m = lo;
    while m <= hi {
        let upper = Rational::from_integer(m.clone());
        let lower = &upper - Rational::one();
        let slab = Interval::bounded(lower.clone(), !closed, upper.clone(), false);
        if !range.intersect(&slab).is_empty() {
            // Sides of the slab already implied by the range are left out.
            let mut next = cell.clone();
            let max = range.upper.as_ref().unwrap();
            if max.value > upper {
                next.push(LinearConstraint::le(w.to_vec(), upper)).unwrap();
            }
            let min = range.lower.as_ref().unwrap();
            let implied = min.value > lower || (min.value == lower && (closed || min.strict));
            if !implied {
                next.push(if closed {
                    LinearConstraint::ge(w.to_vec(), lower)
                } else {
                    LinearConstraint::gt(w.to_vec(), lower)
                })
                .unwrap();
            }
            out.push((m.clone(), next));
        }
        m += 1;
    }
    out
}

fn extend_label(
    weights: &[Vec<Rational>],
    closed: bool,
    cell: HalfOpenPolyhedron,
    prefix: Vec<BigInt>,
    out: &mut Vec<Vec<BigInt>>,
) {
    let j = prefix.len();
    if j == weights.len() {
        out.push(prefix);
        return;
    }
    for (mj, next) in label_candidates(&cell, &weights[j], closed) {
        let mut longer = prefix.clone();
        longer.push(mj);
        extend_label(weights, closed, next, longer, out);
    }
}
