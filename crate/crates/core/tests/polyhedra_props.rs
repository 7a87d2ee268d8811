mod common;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use zonostrat_core::linalg::Rational;
use zonostrat_core::polyhedra::{HalfOpenPolyhedron, Interval, LinearConstraint, Relation};

use common::q;

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![4 => Just(Relation::Le), 3 => Just(Relation::Lt), 1 => Just(Relation::Eq)]
}

/// Systems in at most 4 variables with at most 8 small integer constraints,
/// bounded by a box so that ranges are finite.
fn system() -> impl Strategy<Value = HalfOpenPolyhedron> {
    (1usize..=4).prop_flat_map(|dim| {
        prop::collection::vec((prop::collection::vec(-3i64..=3, dim), relation(), -4i64..=4), 0..=8).prop_map(
            move |rows| {
                let mut sys = HalfOpenPolyhedron::new(dim);
                for i in 0..dim {
                    let mut e = vec![Rational::zero(); dim];
                    e[i] = Rational::one();
                    sys.push(LinearConstraint::le(e.clone(), q(3))).unwrap();
                    sys.push(LinearConstraint::ge(e, q(-3))).unwrap();
                }
                for (a, rel, b) in rows {
                    sys.push(LinearConstraint::new(a.into_iter().map(q).collect(), rel, q(b))).unwrap();
                }
                sys
            },
        )
    })
}

/// Grid points in `[−3, 3]^dim` with spacing 1/2 (spacing 1 above two
/// dimensions).
fn grid(dim: usize) -> Vec<Vec<Rational>> {
    let step = if dim <= 2 { 1 } else { 2 };
    let axis: Vec<Rational> = (-6..=6).step_by(step).map(|i| Rational::new(i.into(), 2.into())).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Rational>| {
                axis.iter().map(move |x| {
                    let mut longer = p.clone();
                    longer.push(x.clone());
                    longer
                })
            })
            .collect();
    }
    out
}

/// The values of `x_var` allowed by `sys` with the other coordinates fixed,
/// computed by direct substitution.
fn fiber_interval(sys: &HalfOpenPolyhedron, var: usize, x: &[Rational]) -> Option<Interval> {
    let mut interval = Interval::unbounded();
    for c in sys.constraints() {
        let a = &c.coefficients[var];
        let rest: Rational = c
            .coefficients
            .iter()
            .zip(x)
            .enumerate()
            .filter(|(i, _)| *i != var)
            .map(|(_, (a, b))| a * b)
            .sum();
        let free = &c.rhs - rest;
        if a.is_zero() {
            let ok = match c.relation {
                Relation::Le => !free.is_negative(),
                Relation::Lt => free.is_positive(),
                Relation::Eq => free.is_zero(),
            };
            if !ok {
                return None;
            }
            continue;
        }
        let value = &free / a;
        let strict = c.relation == Relation::Lt;
        let pieces = match c.relation {
            Relation::Eq => vec![Interval::bounded(value.clone(), false, value, false)],
            _ if a.is_positive() => vec![Interval::at_most(value, strict)],
            _ => vec![Interval::at_least(value, strict)],
        };
        for piece in pieces {
            interval = interval.intersect(&piece);
        }
    }
    (!interval.is_empty()).then_some(interval)
}


proptest! {
    #![proptest_config(common::config(96))]

    #[test]
    fn witnesses_satisfy_the_system(sys in system()) {
        if let Some(x) = sys.feasible_point() {
            prop_assert!(sys.contains(&x));
        }
    }

    #[test]
    fn grid_points_prove_feasibility(sys in system()) {
        let hit = grid(sys.ambient_dim()).into_iter().any(|x| sys.contains(&x));
        if hit {
            prop_assert!(sys.is_feasible());
        }
    }

    #[test]
    fn one_step_projection_is_exact(sys in system(), var in 0usize..4, probes in prop::collection::vec(prop::collection::vec(-6i64..=6, 4), 12)) {
        let dim = sys.ambient_dim();
        let var = var % dim;
        let projected = sys.eliminate_variable(var);
        prop_assert!(projected.constraints().iter().all(|c| c.coefficients[var].is_zero()));
        // Feasible points project into the projection.
        if let Some(x) = sys.feasible_point() {
            prop_assert!(projected.contains(&x));
        }
        // A point of the projection lifts: the substituted system in x_var is
        // nonempty, and conversely.
        for probe in probes {
            let x: Vec<Rational> = probe[..dim].iter().map(|&v| Rational::new(v.into(), 2.into())).collect();
            let lifts = fiber_interval(&sys, var, &x).is_some();
            prop_assert_eq!(projected.contains(&x), lifts);
        }
    }

    #[test]
    fn ranges_bound_every_point(sys in system(), objective in prop::collection::vec(-3i64..=3, 4)) {
        let dim = sys.ambient_dim();
        let objective: Vec<Rational> = objective[..dim].iter().map(|&v| q(v)).collect();
        match sys.range(&objective) {
            None => prop_assert!(!sys.is_feasible()),
            Some(range) => {
                let x = sys.feasible_point().unwrap();
                let value: Rational = objective.iter().zip(&x).map(|(a, b)| a * b).sum();
                prop_assert!(range.contains(&value));
                for p in grid(dim).into_iter().filter(|p| sys.contains(p)) {
                    let v: Rational = objective.iter().zip(&p).map(|(a, b)| a * b).sum();
                    prop_assert!(range.contains(&v));
                }
                // Attained endpoints: pinning the objective to a closed end
                // leaves a feasible system.
                for bound in [&range.lower, &range.upper].into_iter().flatten() {
                    let mut pinned = sys.clone();
                    pinned.push(LinearConstraint::eq(objective.clone(), bound.value.clone())).unwrap();
                    prop_assert_eq!(pinned.is_feasible(), !bound.strict);
                }
            }
        }
    }

    #[test]
    fn relative_interior(sys in system()) {
        let Ok((implicit, w)) = sys.relative_interior() else {
            prop_assert!(!sys.is_feasible());
            return Ok(());
        };
        prop_assert!(sys.contains(&w));
        for (i, c) in sys.constraints().iter().enumerate() {
            if implicit.contains(&i) {
                // Tight everywhere: making it strict empties the system.
                prop_assert!(c.relation != Relation::Lt);
                if c.relation == Relation::Le {
                    let mut strict = HalfOpenPolyhedron::new(sys.ambient_dim());
                    for (j, d) in sys.constraints().iter().enumerate() {
                        let d = if i == j { LinearConstraint::new(d.coefficients.clone(), Relation::Lt, d.rhs.clone()) } else { d.clone() };
                        strict.push(d).unwrap();
                    }
                    prop_assert!(!strict.is_feasible());
                }
            } else {
                prop_assert!(c.is_strictly_satisfied_by(&w));
            }
        }
        let dim = sys.affine_dimension().unwrap();
        prop_assert_eq!(dim, sys.ambient_dim() - sys.normal_rank(&implicit));
    }
}

#[test]
fn eliminate_variable_on_a_triangle() {
    // 0 ≤ y, y < x, x ≤ 1 projects onto 0 < x ≤ 1.
    let mut sys = HalfOpenPolyhedron::new(2);
    sys.push(LinearConstraint::ge(vec![q(0), q(1)], q(0))).unwrap();
    sys.push(LinearConstraint::lt(vec![q(-1), q(1)], q(0))).unwrap();
    sys.push(LinearConstraint::le(vec![q(1), q(0)], q(1))).unwrap();
    let p = sys.eliminate_variable(1);
    assert!(p.contains(&[q(1), q(7)]));
    assert!(!p.contains(&[q(0), q(0)]));
    assert!(p.contains(&[Rational::new(1.into(), 100.into()), q(0)]));
    assert!(!p.contains(&[q(2), q(0)]));
}
