#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use zonostrat_core::linalg::{IntMatrix, Rational};
use zonostrat_core::Instance;

/// Fixed case count; failures are reported, not persisted to disk.
pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Vector lists with `n ≤ max_n`, `k ≤ max_k` and entries in `[−3, 3]`.
pub fn vectors(max_n: usize, max_k: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_n, 1..=max_k).prop_flat_map(|(n, k)| prop::collection::vec(prop::collection::vec(-3i64..=3, n), k))
}

pub fn instance(max_n: usize, max_k: usize) -> impl Strategy<Value = Instance> {
    vectors(max_n, max_k).prop_map(|v| Instance::from_i64(&v).unwrap())
}

pub fn full_rank_instance(max_n: usize, max_k: usize) -> impl Strategy<Value = Instance> {
    instance(max_n, max_k).prop_filter("full rank", |i| i.is_full_rank())
}

pub fn int_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-4i64..=4, r * c).prop_map(move |d| IntMatrix::from_i64(r, c, &d))
    })
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| x.into()).collect()
}

/// Every integer vector in the box `∏ [lo_i, hi_i]`, lexicographically.
pub fn box_points(bounds: &[(BigInt, BigInt)]) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for (lo, hi) in bounds {
        let mut next = Vec::new();
        for p in &out {
            let mut x = lo.clone();
            while &x <= hi {
                let mut longer: Vec<BigInt> = p.clone();
                longer.push(x.clone());
                next.push(longer);
                x += 1;
            }
        }
        out = next;
    }
    out
}

/// Lattice points of the closed zonotope found by scanning its bounding box
/// and testing each point against the closed cube.
pub fn closed_points_by_scan(inst: &Instance) -> Vec<Vec<BigInt>> {
    let bounds: Vec<_> = (0..inst.codim()).map(|i| inst.bounding_box(i)).collect();
    box_points(&bounds)
        .into_iter()
        .filter(|p| inst.cube_fiber(p, true).is_feasible())
        .collect()
}
