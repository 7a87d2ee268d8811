mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use zonostrat_core::linalg::*;

use common::{instance, int_matrix};

fn unimodular(u: &IntMatrix) -> bool {
    determinant(u).abs().is_one()
}

proptest! {
    #![proptest_config(common::config(128))]

    #[test]
    fn hermite_form_is_a_unimodular_transform(m in int_matrix(5, 5)) {
        let (h, u) = hermite_normal_form(&m);
        prop_assert!(unimodular(&u));
        prop_assert_eq!(u.mul(&m), h.clone());
        // Pivots strictly move right and are positive; entries above a pivot
        // are reduced into [0, pivot).
        let mut last: Option<usize> = None;
        for i in 0..h.rows() {
            let Some(c) = h.row(i).iter().position(|x| !x.is_zero()) else {
                prop_assert!((i..h.rows()).all(|j| h.row(j).iter().all(Zero::is_zero)));
                break;
            };
            prop_assert!(last.is_none_or(|l| c > l));
            prop_assert!(h[(i, c)].is_positive());
            for above in 0..i {
                prop_assert!(!h[(above, c)].is_negative() && h[(above, c)] < h[(i, c)]);
            }
            last = Some(c);
        }
    }

    #[test]
    fn smith_form_is_diagonal_with_divisibility(m in int_matrix(5, 5)) {
        let (d, u, v) = smith_normal_form(&m);
        prop_assert!(unimodular(&u) && unimodular(&v));
        prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j {
                    prop_assert!(d[(i, j)].is_zero());
                }
            }
        }
        let diag: Vec<BigInt> = (0..d.rows().min(d.cols())).map(|i| d[(i, i)].clone()).collect();
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        prop_assert_eq!(diag.iter().filter(|x| !x.is_zero()).count(), rank(&m));
    }

    #[test]
    fn integer_kernels_are_kernels(m in int_matrix(4, 6)) {
        let k = integer_kernel(&m);
        prop_assert_eq!(k.rows(), m.cols() - rank(&m));
        prop_assert!(m.mul(&k.transpose()).is_zero());
        // Saturated: the kernel basis extends to a unimodular matrix, i.e. its
        // invariant factors are all 1.
        prop_assert!(invariant_factors(&k).iter().all(One::is_one));
    }

    #[test]
    fn cokernel_presentation(inst in instance(3, 7)) {
        let p = inst.pi();
        prop_assert_eq!(p.rows(), inst.k() - inst.rank());
        prop_assert!(p.mul(inst.phi()).is_zero());
        // Onto Z^{k−r}.
        prop_assert!(invariant_factors(p).iter().all(One::is_one));
        // Its kernel is the saturated image lattice.
        prop_assert!(p.mul(&inst.image_lattice().transpose()).is_zero());
        prop_assert_eq!(inst.image_lattice().rows(), inst.rank());
    }

    #[test]
    fn integer_solutions(m in int_matrix(4, 5), x in prop::collection::vec(-5i64..=5, 5)) {
        let x: Vec<BigInt> = x[..m.cols()].iter().map(|&v| v.into()).collect();
        let b = m.mul_vec(&x);
        let y = solve_integer(&m, &b).unwrap();
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn preimage_lattice_maps_into_the_integers(inst in instance(3, 6)) {
        let pre = inst.preimage();
        let phi = inst.phi().to_rational();
        prop_assert_eq!(pre.basis.rows(), inst.rank());
        for i in 0..pre.basis.rows() {
            let image = phi.mul_vec(pre.basis.row(i));
            prop_assert!(image.iter().all(|x| x.is_integer()));
        }
        prop_assert!(inst.phi().mul(&pre.kernel.transpose()).is_zero());
        // The images of the basis generate the saturated image lattice.
        let images: Vec<Vec<BigInt>> = (0..pre.basis.rows())
            .map(|i| phi.mul_vec(pre.basis.row(i)).into_iter().map(|x| x.to_integer()).collect())
            .collect();
        let generated = IntMatrix::from_rows(images, inst.k());
        prop_assert!(same_row_lattice(&generated, inst.image_lattice()));
    }

    #[test]
    fn canonical_labels(inst in instance(3, 6), m in prop::collection::vec(-6i64..=6, 6), shift in prop::collection::vec(-3i64..=3, 6)) {
        let k = inst.k();
        let m: Vec<BigInt> = m[..k].iter().map(|&v| v.into()).collect();
        let c = inst.canonicalize_label(&m);
        prop_assert_eq!(inst.canonicalize_label(&c), c.clone());
        prop_assert_eq!(inst.project(&c), inst.project(&m));
        // Shifting by the image lattice does not change the representative.
        let basis = inst.image_lattice();
        let mut shifted = m.clone();
        for (i, s) in shift.iter().take(basis.rows()).enumerate() {
            for (x, b) in shifted.iter_mut().zip(basis.row(i)) {
                *x += BigInt::from(*s) * b;
            }
        }
        prop_assert_eq!(inst.canonicalize_label(&shifted), c);
    }
}

#[test]
fn known_normal_forms() {
    let m = IntMatrix::from_i64(2, 2, &[2, 4, 6, 8]);
    assert_eq!(invariant_factors(&m), int_vec(&[2, 4]));
    let m = IntMatrix::from_i64(2, 2, &[1, 1, 1, -1]);
    assert_eq!(invariant_factors(&m), int_vec(&[1, 2]));
    assert_eq!(determinant(&m), BigInt::from(-2));
    let (h, _) = hermite_normal_form(&IntMatrix::from_i64(2, 3, &[2, 3, 4, 4, 6, 9]));
    assert_eq!(h, IntMatrix::from_i64(2, 3, &[2, 3, 0, 0, 0, 1]));
}
