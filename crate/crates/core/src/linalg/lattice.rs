//! Integer lattices attached to an integer matrix `V` (k x n): kernels,
//! saturations, the cokernel presentation, integer solves, and the
//! preimage lattice `{u : V u integral}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::{IntMatrix, RatMatrix, Rational};
use super::normal_form::{echelon_rank, hermite_normal_form, rank, rref, solve_rational};
use crate::error::{Error, Result};

/// Canonical (Hermite) basis of the lattice spanned by the rows of `m`.
/// Zero rows are dropped.
pub fn row_lattice_basis(m: &IntMatrix) -> IntMatrix {
    let (h, _) = hermite_normal_form(m);
    let r = echelon_rank(&h);
    h.select_rows(&(0..r).collect::<Vec<_>>())
}

/// Basis (as rows, in Hermite form) of `{y in Z^rows : y M = 0}`. This
/// lattice is always saturated.
pub fn integer_left_kernel(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hermite_normal_form(m);
    let r = echelon_rank(&h);
    let kernel = u.select_rows(&(r..m.rows()).collect::<Vec<_>>());
    row_lattice_basis(&kernel)
}

/// Basis (as rows, in Hermite form) of `{x in Z^cols : M x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    integer_left_kernel(&m.transpose())
}

/// Integral presentation `P` ((k-r) x k) of the cokernel of `V`.
///
/// The rows of `P` span the (saturated) left kernel of `V`, so
/// `ker_Q(P) = colspace_Q(V)` and `P` maps `Z^k` onto `Z^{k-r}`. The
/// output is in Hermite form.
pub fn saturation_cokernel(v: &IntMatrix) -> IntMatrix {
    integer_left_kernel(v)
}

/// Integer basis (rows, Hermite form) of the saturated lattice
/// `colspace_R(V) ∩ Z^k`.
pub fn image_saturation_lattice(v: &IntMatrix) -> IntMatrix {
    integer_kernel(&saturation_cokernel(v))
}

/// Finds an integer `x` with `M x = b`, or reports [`Error::NoSolution`].
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Result<Vec<BigInt>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, expected {}",
            b.len(),
            m.rows()
        )));
    }
    // U M^T = H  =>  M U^T = H^T. Write x = U^T y; then H^T y = b, i.e. b is
    // an integer combination of the rows of H.
    let (h, u) = hermite_normal_form(&m.transpose());
    let mut residual = b.to_vec();
    let mut x = vec![BigInt::zero(); m.cols()];
    for i in 0..echelon_rank(&h) {
        let pivot_col = (0..h.cols()).find(|&j| !h[(i, j)].is_zero()).unwrap();
        let (q, rem) = residual[pivot_col].div_rem(&h[(i, pivot_col)]);
        if !rem.is_zero() {
            return Err(Error::NoSolution);
        }
        if q.is_zero() {
            continue;
        }
        for (r, hv) in residual.iter_mut().zip(h.row(i)) {
            *r -= &q * hv;
        }
        for (xv, uv) in x.iter_mut().zip(u.row(i)) {
            *xv += &q * uv;
        }
    }
    if residual.iter().any(|r| !r.is_zero()) {
        return Err(Error::NoSolution);
    }
    Ok(x)
}

/// The translation lattice `Λ = {u in R^n : V u in Z^k}` split as
/// `Λ = Λ_0 ⊕ ker V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreimageLattice {
    /// Integer basis (rows) of `ker V ∩ Z^n`; spans `ker V` over Q.
    pub kernel: IntMatrix,
    /// Rational basis (rows, r of them) of `Λ_0 = Λ ∩ rowspace(V)`.
    pub basis: RatMatrix,
}

impl PreimageLattice {
    /// True when `Λ = Z^n` (full rank and unit covolume).
    pub fn is_standard(&self) -> bool {
        let n = self.basis.cols();
        self.kernel.rows() == 0 && self.basis == IntMatrix::identity(n).to_rational()
    }
}

/// Computes `Λ_0` as the lift of `L = colspace_R(V) ∩ Z^k` into the row
/// space of `V`, put into a canonical (scaled Hermite) form.
pub fn phi_preimage_lattice(v: &IntMatrix) -> PreimageLattice {
    let n = v.cols();
    let kernel = integer_kernel(v);

    // Independent rows of V span its row space.
    let (_, row_pivots) = rref(&v.transpose().to_rational());
    let r = row_pivots.len();
    let row_basis = v.select_rows(&row_pivots).to_rational(); // r x n
    let system = v.to_rational().mul(&row_basis.transpose()); // k x r, full column rank

    let lattice = image_saturation_lattice(v);
    let mut lifts = Vec::with_capacity(r);
    for i in 0..lattice.rows() {
        let target: Vec<Rational> = lattice
            .row(i)
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect();
        let t = solve_rational(&system, &target).expect("lattice vector lies in the image");
        lifts.push(row_basis.transpose().mul_vec(&t));
    }
    let lifts = RatMatrix::from_rows(lifts, n);
    PreimageLattice {
        kernel,
        basis: canonical_rational_basis(&lifts),
    }
}

/// Hermite form of a rational row basis: clear denominators, reduce, scale back.
pub fn canonical_rational_basis(m: &RatMatrix) -> RatMatrix {
    let denom = (0..m.rows())
        .flat_map(|i| m.row(i).iter().map(|x| x.denom().clone()))
        .fold(BigInt::one(), |acc, d| acc.lcm(&d));
    let scaled = m.map(|x| (x * Rational::from_integer(denom.clone())).to_integer());
    let h = row_lattice_basis(&scaled);
    h.map(|x| Rational::new(x.clone(), denom.clone()))
}

/// True when the rows of `a` and `b` generate the same lattice.
pub fn same_row_lattice(a: &IntMatrix, b: &IntMatrix) -> bool {
    a.cols() == b.cols() && row_lattice_basis(a) == row_lattice_basis(b)
}

/// True when the rational row bases generate the same lattice.
pub fn same_rational_lattice(a: &RatMatrix, b: &RatMatrix) -> bool {
    a.cols() == b.cols() && canonical_rational_basis(a) == canonical_rational_basis(b)
}

/// Rank of `M` restricted to the given rows.
pub fn rank_of_rows(m: &IntMatrix, rows: &[usize]) -> usize {
    rank(&m.select_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::int_vec;
    use crate::linalg::normal_form::invariant_factors;

    fn hirzebruch() -> IntMatrix {
        IntMatrix::from_i64(4, 2, &[1, 0, 0, 1, -1, 2, 0, -1])
    }

    fn blowup() -> IntMatrix {
        IntMatrix::from_i64(5, 2, &[1, 0, 0, 1, -1, 2, 0, -1, -1, -1])
    }

    #[test]
    fn cokernel_matches_printed_projection() {
        let p = saturation_cokernel(&hirzebruch());
        let printed = IntMatrix::from_i64(2, 4, &[1, -2, 1, 0, 0, 1, 0, 1]);
        assert!(p.mul(&hirzebruch()).is_zero());
        assert!(same_row_lattice(&p, &printed));

        let p = saturation_cokernel(&blowup());
        let printed =
            IntMatrix::from_i64(3, 5, &[1, -2, 1, 0, 0, 0, 1, 0, 1, 0, 1, 1, 0, 0, 1]);
        assert!(same_row_lattice(&p, &printed));
    }

    #[test]
    fn cokernel_of_full_rank_is_empty() {
        let p = saturation_cokernel(&IntMatrix::from_i64(1, 1, &[2]));
        assert_eq!((p.rows(), p.cols()), (0, 1));
    }

    #[test]
    fn cokernel_is_surjective() {
        let v = IntMatrix::from_i64(4, 2, &[2, 0, 0, 2, 2, 2, 1, 3]);
        let p = saturation_cokernel(&v);
        for i in 0..p.rows() {
            let mut e = vec![BigInt::zero(); p.rows()];
            e[i] = BigInt::one();
            let x = solve_integer(&p, &e).unwrap();
            assert_eq!(p.mul_vec(&x), e);
        }
    }

    #[test]
    fn integer_solves() {
        let printed = IntMatrix::from_i64(2, 4, &[1, -2, 1, 0, 0, 1, 0, 1]);
        let x = solve_integer(&printed, &int_vec(&[0, 0])).unwrap();
        assert!(x.iter().all(|v| v.is_zero()));
        let x = solve_integer(&printed, &int_vec(&[1, 0])).unwrap();
        assert_eq!(printed.mul_vec(&x), int_vec(&[1, 0]));
        // Differs from (1,0,0,0) by an element of the kernel.
        let diff: Vec<BigInt> = x.iter().zip(int_vec(&[1, 0, 0, 0])).map(|(a, b)| a - b).collect();
        assert!(printed.mul_vec(&diff).iter().all(|v| v.is_zero()));

        let two = IntMatrix::from_i64(1, 1, &[2]);
        assert_eq!(solve_integer(&two, &int_vec(&[1])), Err(Error::NoSolution));
    }

    #[test]
    fn preimage_lattices() {
        let lam = phi_preimage_lattice(&hirzebruch());
        assert!(lam.is_standard());

        let lam = phi_preimage_lattice(&IntMatrix::from_i64(1, 1, &[2]));
        assert_eq!(lam.basis, RatMatrix::from_vec(1, 1, vec![Rational::new(1.into(), 2.into())]));

        let lam = phi_preimage_lattice(&IntMatrix::from_i64(2, 2, &[1, 1, 1, -1]));
        let half = Rational::new(1.into(), 2.into());
        let expected = RatMatrix::from_vec(
            2,
            2,
            vec![Rational::one(), Rational::zero(), half.clone(), half],
        );
        assert!(same_rational_lattice(&lam.basis, &expected));
    }

    #[test]
    fn preimage_lattice_rank_deficient() {
        let lam = phi_preimage_lattice(&IntMatrix::from_i64(1, 2, &[1, 0]));
        assert_eq!(lam.kernel, IntMatrix::from_i64(1, 2, &[0, 1]));
        assert_eq!(lam.basis, IntMatrix::from_i64(1, 2, &[1, 0]).to_rational());
    }

    #[test]
    fn image_saturations() {
        let l = image_saturation_lattice(&hirzebruch());
        assert_eq!(l, IntMatrix::from_i64(2, 4, &[1, 0, -1, 0, 0, 1, 2, -1]));
        let l = image_saturation_lattice(&IntMatrix::from_i64(1, 1, &[2]));
        assert_eq!(l, IntMatrix::from_i64(1, 1, &[1]));
        let l = image_saturation_lattice(&IntMatrix::from_i64(2, 1, &[1, -1]));
        assert_eq!(l, IntMatrix::from_i64(1, 2, &[1, -1]));
        assert!(invariant_factors(&l).iter().all(|d| d.is_one()));
    }
}
