//! Exact integer and rational linear algebra.

mod lattice;
mod matrix;
mod normal_form;

pub use lattice::{
    canonical_rational_basis, image_saturation_lattice, integer_kernel, integer_left_kernel,
    phi_preimage_lattice, rank_of_rows, row_lattice_basis, same_rational_lattice,
    same_row_lattice, saturation_cokernel, solve_integer, PreimageLattice,
};
pub use matrix::{dot, int_vec, to_rational_vec, IntMatrix, Matrix, RatMatrix, Rational};
pub use normal_form::{
    determinant, echelon_rank, hermite_normal_form, invariant_factors, rank, rational_rank, rref,
    smith_normal_form, solve_rational,
};
