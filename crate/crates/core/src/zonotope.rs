//! Lattice points and faces of the half-open zonotope `Z = π([0,1)^k)` and
//! its closure.
//!
//! Points are written in the coordinates of the canonical cokernel
//! presentation `pi`. A face is identified by its zero set `J`: the face is
//! `π({x ∈ [0,1]^k : x_j = 0 for j ∈ J})`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::{invariant_factors, integer_kernel, solve_integer, IntMatrix, Rational};
use crate::polyhedra::{HalfOpenPolyhedron, LinearConstraint};

/// A lattice point of the closed zonotope.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZonotopePoint {
    /// Coordinates in `Z^{k−r}`.
    pub p: Vec<BigInt>,
    /// Some `m ∈ Z^k` with `pi · m = p`.
    pub preimage: Vec<BigInt>,
    pub in_half_open: bool,
}

/// A face of the zonotope, given by its zero set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZonotopeFace {
    pub zero_set: BTreeSet<usize>,
    pub dim: usize,
}

/// An instance realizing a given lattice zonotope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorRealization {
    pub instance: Instance,
    /// Integer `m × (k−r)` matrix sending `π(e_j)` to `w_j`.
    pub identification: IntMatrix,
    /// Set when the `w_j` generate a proper sublattice of the saturated
    /// lattice they span. The identification then preserves `π(Z^k)` but not
    /// the ambient lattice.
    pub coarser_lattice: bool,
}

fn q(x: &BigInt) -> Rational {
    Rational::from_integer(x.clone())
}

fn unit(len: usize, i: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); len];
    e[i] = Rational::one();
    e
}

/// `{x ∈ R^k : 0 ≤ x_j, x_j (< | ≤) 1, x_j = 0 for j ∈ zeros}` as a system.
/// Constraint `2j` is `x_j ≥ 0`, `2j + 1` the upper bound.
fn cube(k: usize, closed: bool, zeros: &BTreeSet<usize>) -> HalfOpenPolyhedron {
    let mut sys = HalfOpenPolyhedron::new(k);
    for j in 0..k {
        let e = unit(k, j);
        sys.push(LinearConstraint::ge(e.clone(), Rational::zero())).unwrap();
        let upper = if zeros.contains(&j) {
            LinearConstraint::le(e, Rational::zero())
        } else if closed {
            LinearConstraint::le(e, Rational::one())
        } else {
            LinearConstraint::lt(e, Rational::one())
        };
        sys.push(upper).unwrap();
    }
    sys
}

fn check_point_dim(inst: &Instance, p: &[BigInt]) -> Result<()> {
    if p.len() != inst.codim() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, expected {}",
            p.len(),
            inst.codim()
        )));
    }
    Ok(())
}

fn format_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

impl Instance {
    /// Realizes the zonotope `Σ [0, w_j]` for vectors `w_j ∈ Z^m`: the new
    /// vectors are the rows of an integer kernel basis (as columns) of
    /// `e_j ↦ w_j`.
    pub fn from_zonotope_generators(w: &[Vec<BigInt>]) -> Result<GeneratorRealization> {
        let Some(first) = w.first() else {
            return Err(Error::EmptyInstance);
        };
        let m = first.len();
        if w.iter().any(|v| v.len() != m) {
            return Err(Error::DimensionMismatch("generators have different lengths".into()));
        }
        let gens = IntMatrix::from_rows(w.to_vec(), m).transpose(); // m × k
        let kernel = integer_kernel(&gens); // d × k
        let instance = Instance::from_phi(kernel.transpose());
        // T · pi = gens, with T = gens · X for any integer right inverse X of pi.
        let c = instance.codim();
        let mut identification = IntMatrix::zeros(m, c);
        for i in 0..c {
            let mut e = vec![BigInt::zero(); c];
            e[i] = BigInt::one();
            let x = solve_integer(instance.pi(), &e).expect("pi is surjective");
            for (row, value) in gens.mul_vec(&x).into_iter().enumerate() {
                identification[(row, i)] = value;
            }
        }
        debug_assert_eq!(identification.mul(instance.pi()), gens);
        let coarser_lattice = invariant_factors(&gens).iter().any(|d| !d.is_zero() && !d.is_one());
        Ok(GeneratorRealization {
            instance,
            identification,
            coarser_lattice,
        })
    }

    /// Lattice points of the closed zonotope, sorted lexicographically.
    ///
    /// `p` lies in the closed zonotope iff `x = m − phi · y ∈ [0,1]^k` for an
    /// integer `m` with `pi · m = p`, i.e. iff the closed fiber
    /// `m − 1 ≤ phi · y ≤ m` is nonempty. The points are therefore the images
    /// of the closed labels realized on the fundamental domain.
    pub fn closed_lattice_points(&self) -> Vec<ZonotopePoint> {
        let coords: BTreeSet<Vec<BigInt>> = self
            .domain_labels(true)
            .iter()
            .map(|m| self.project(m))
            .collect();
        coords
            .into_iter()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|p| self.make_point(p))
            .collect()
    }

    /// `[Σ_j min(0, P_ij), Σ_j max(0, P_ij)]`.
    pub fn bounding_box(&self, i: usize) -> (BigInt, BigInt) {
        let row = self.pi().row(i);
        let lo = row.iter().filter(|x| x.is_negative()).sum();
        let hi = row.iter().filter(|x| x.is_positive()).sum();
        (lo, hi)
    }

    fn make_point(&self, p: Vec<BigInt>) -> ZonotopePoint {
        let preimage = solve_integer(self.pi(), &p).expect("pi is surjective");
        let in_half_open = self.label_fiber(&preimage, false).is_feasible();
        ZonotopePoint {
            p,
            preimage,
            in_half_open,
        }
    }

    /// Lattice-point count of the closed zonotope by Stanley's formula: the
    /// sum over linearly independent subsets of the generators `π(e_j)` of
    /// the gcd of the maximal minors of that subset (1 for the empty set).
    pub fn stanley_count(&self) -> BigInt {
        let k = self.k();
        let c = self.codim();
        assert!(k < usize::BITS as usize, "too many generators");
        (0u64..1 << k)
            .into_par_iter()
            .filter(|mask| (mask.count_ones() as usize) <= c)
            .map(|mask| {
                let cols: Vec<usize> = (0..k).filter(|j| mask >> j & 1 == 1).collect();
                if cols.is_empty() {
                    return BigInt::one();
                }
                let factors = invariant_factors(&self.pi().select_cols(&cols));
                if factors.len() < cols.len() || factors.iter().any(|d| d.is_zero()) {
                    return BigInt::zero();
                }
                factors.iter().product()
            })
            .sum()
    }

    /// Whether `p` lies in the half-open zonotope, decided by the Φ-fiber of
    /// an integer preimage of `p`.
    pub fn half_open_membership(&self, p: &[BigInt]) -> Result<bool> {
        check_point_dim(self, p)?;
        let m = solve_integer(self.pi(), p).map_err(|_| Error::NotInImageLattice(format_vec(p)))?;
        Ok(self.label_fiber(&m, false).is_feasible())
    }

    /// The same membership decided directly on the cube: is there
    /// `x ∈ [0,1)^k` with `pi · x = p`?
    pub fn cube_membership(&self, p: &[BigInt]) -> Result<bool> {
        check_point_dim(self, p)?;
        Ok(self.cube_fiber(p, false).is_feasible())
    }

    /// `{x ∈ [0,1)^k : pi · x = p}` (closed cube when `closed`).
    pub fn cube_fiber(&self, p: &[BigInt], closed: bool) -> HalfOpenPolyhedron {
        self.cube_face_fiber(p, closed, &BTreeSet::new())
    }

    fn cube_face_fiber(&self, p: &[BigInt], closed: bool, zeros: &BTreeSet<usize>) -> HalfOpenPolyhedron {
        let mut sys = cube(self.k(), closed, zeros);
        for (i, value) in p.iter().enumerate() {
            let row: Vec<Rational> = self.pi().row(i).iter().map(q).collect();
            sys.push(LinearConstraint::eq(row, q(value))).unwrap();
        }
        sys
    }

    /// Whether `p` lies on the closed face with zero set `zeros`. A candidate
    /// cube point is checked first by substitution; otherwise the face fiber
    /// is tested for feasibility.
    pub fn on_closed_face(&self, p: &[BigInt], zeros: &BTreeSet<usize>, candidate: Option<&[Rational]>) -> bool {
        let sys = self.cube_face_fiber(p, true, zeros);
        if candidate.is_some_and(|x| sys.contains(x)) {
            return true;
        }
        sys.is_feasible()
    }

    /// Lattice points of the half-open zonotope, sorted lexicographically.
    pub fn half_open_lattice_points(&self) -> Vec<ZonotopePoint> {
        self.closed_lattice_points()
            .into_iter()
            .filter(|pt| pt.in_half_open)
            .collect()
    }

    /// Indices `j` with `x_j = 0` on all of `{x ∈ [0,1)^k : pi · x = p}`.
    pub fn fiber_zero_set(&self, p: &[BigInt]) -> Result<BTreeSet<usize>> {
        Ok(self.fiber_zero_set_with_witness(p)?.0)
    }

    /// The zero set together with a relative-interior point of the cube fiber.
    pub fn fiber_zero_set_with_witness(&self, p: &[BigInt]) -> Result<(BTreeSet<usize>, Vec<Rational>)> {
        check_point_dim(self, p)?;
        let (implicit, witness) = self
            .cube_fiber(p, false)
            .relative_interior()
            .map_err(|_| Error::EmptyFiber(format_vec(p)))?;
        let zeros = implicit.into_iter().filter(|&i| i % 2 == 0 && i < 2 * self.k()).map(|i| i / 2).collect();
        Ok((zeros, witness))
    }

    /// Dimension of the face with zero set `zeros`: the rank of the columns
    /// of `pi` outside `zeros`.
    pub fn face_dimension(&self, zeros: &BTreeSet<usize>) -> usize {
        self.pi_rank_outside(zeros)
    }

    /// Minimal face of the zonotope containing `p`.
    pub fn minimal_face(&self, p: &[BigInt]) -> Result<ZonotopeFace> {
        let zero_set = self.fiber_zero_set(p)?;
        let dim = self.face_dimension(&zero_set);
        Ok(ZonotopeFace { zero_set, dim })
    }

    /// `(k − |J|) − (r − rank A_J)`, the face dimension written through the
    /// vectors instead of `pi`.
    pub fn face_dimension_from_vectors(&self, zeros: &BTreeSet<usize>) -> usize {
        (self.k() - zeros.len()) - (self.rank() - self.rank_of(zeros))
    }
}
