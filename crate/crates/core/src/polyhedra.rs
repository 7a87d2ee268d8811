//! Feasibility, implicit equalities, witnesses and affine dimension for
//! systems mixing `≤`, `<` and `=` constraints.
//!
//! Equalities are removed first by substitution. The remaining inequalities
//! go through Fourier–Motzkin elimination, where a combined row is strict iff
//! either parent is strict. Witnesses are recovered by walking the
//! elimination tower backwards and taking the midpoint of the allowed
//! interval at each level.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot, rational_rank, RatMatrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `a·x ≤ b`
    Le,
    /// `a·x < b`
    Lt,
    /// `a·x = b`
    Eq,
}

/// One constraint `coefficients · x  (relation)  rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        LinearConstraint {
            coefficients,
            relation,
            rhs,
        }
    }

    pub fn le(coefficients: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coefficients, Relation::Le, rhs)
    }

    pub fn lt(coefficients: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coefficients, Relation::Lt, rhs)
    }

    pub fn eq(coefficients: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coefficients, Relation::Eq, rhs)
    }

    /// `coefficients · x ≥ rhs`, stored as `-coefficients · x ≤ -rhs`.
    pub fn ge(coefficients: Vec<Rational>, rhs: Rational) -> Self {
        Self::le(negate(&coefficients), -rhs)
    }

    /// `coefficients · x > rhs`, stored as `-coefficients · x < -rhs`.
    pub fn gt(coefficients: Vec<Rational>, rhs: Rational) -> Self {
        Self::lt(negate(&coefficients), -rhs)
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        dot(&self.coefficients, x)
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = self.evaluate(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Lt => lhs < self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }

    /// Satisfied with slack (only meaningful for inequalities).
    pub fn is_strictly_satisfied_by(&self, x: &[Rational]) -> bool {
        self.evaluate(x) < self.rhs
    }

    fn with_relation(&self, relation: Relation) -> Self {
        LinearConstraint {
            relation,
            ..self.clone()
        }
    }
}

fn negate(v: &[Rational]) -> Vec<Rational> {
    v.iter().map(|x| -x).collect()
}

/// One endpoint of an interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub value: Rational,
    pub strict: bool,
}

/// A (possibly unbounded, possibly half-open) interval of the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl Interval {
    pub fn contains(&self, x: &Rational) -> bool {
        let above = self
            .lower
            .as_ref()
            .is_none_or(|b| if b.strict { *x > b.value } else { *x >= b.value });
        let below = self
            .upper
            .as_ref()
            .is_none_or(|b| if b.strict { *x < b.value } else { *x <= b.value });
        above && below
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => l.value > u.value || (l.value == u.value && (l.strict || u.strict)),
            _ => false,
        }
    }

    /// `[lower, upper]` with the given strictness on each side.
    pub fn bounded(lower: Rational, lower_strict: bool, upper: Rational, upper_strict: bool) -> Self {
        Interval {
            lower: Some(Bound {
                value: lower,
                strict: lower_strict,
            }),
            upper: Some(Bound {
                value: upper,
                strict: upper_strict,
            }),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let mut out = self.clone();
        if let Some(b) = &other.lower {
            out.tighten_lower(b.value.clone(), b.strict);
        }
        if let Some(b) = &other.upper {
            out.tighten_upper(b.value.clone(), b.strict);
        }
        out
    }

    /// Smallest and largest integer in the interval, if both sides are bounded.
    /// Returns `None` for an interval without integers.
    pub fn integer_range(&self) -> Option<(BigInt, BigInt)> {
        let l = self.lower.as_ref()?;
        let u = self.upper.as_ref()?;
        let mut lo = l.value.ceil().to_integer();
        if l.strict && Rational::from_integer(lo.clone()) == l.value {
            lo += 1;
        }
        let mut hi = u.value.floor().to_integer();
        if u.strict && Rational::from_integer(hi.clone()) == u.value {
            hi -= 1;
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Deterministic interior choice: midpoint when bounded on both sides,
    /// one unit inside a lone bound, zero when unbounded.
    fn pick(&self) -> Rational {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => (&l.value + &u.value) / Rational::from_integer(2.into()),
            (Some(l), None) => &l.value + Rational::one(),
            (None, Some(u)) => &u.value - Rational::one(),
            (None, None) => Rational::zero(),
        }
    }

    fn tighten_lower(&mut self, value: Rational, strict: bool) {
        let replace = match &self.lower {
            None => true,
            Some(b) => value > b.value || (value == b.value && strict && !b.strict),
        };
        if replace {
            self.lower = Some(Bound { value, strict });
        }
    }

    fn tighten_upper(&mut self, value: Rational, strict: bool) {
        let replace = match &self.upper {
            None => true,
            Some(b) => value < b.value || (value == b.value && strict && !b.strict),
        };
        if replace {
            self.upper = Some(Bound { value, strict });
        }
    }

    pub fn unbounded() -> Self {
        Interval {
            lower: None,
            upper: None,
        }
    }

    /// `(−∞, value]`, or `(−∞, value)` when `strict`.
    pub fn at_most(value: Rational, strict: bool) -> Self {
        Interval {
            lower: None,
            upper: Some(Bound { value, strict }),
        }
    }

    /// `[value, ∞)`, or `(value, ∞)` when `strict`.
    pub fn at_least(value: Rational, strict: bool) -> Self {
        Interval {
            lower: Some(Bound { value, strict }),
            upper: None,
        }
    }
}

/// Inequality row `coeffs · x (< | ≤) rhs` used inside the elimination.
/// Coefficients are a primitive integer vector (or zero).
#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<BigInt>,
    rhs: Rational,
    strict: bool,
}

impl Row {
    fn new(coeffs: &[Rational], rhs: Rational, strict: bool) -> Row {
        let denominator = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&denominator / c.denom())).collect();
        Row::primitive(ints, rhs * Rational::from_integer(denominator), strict)
    }

    /// Divides through by the content of `coeffs`.
    fn primitive(mut coeffs: Vec<BigInt>, mut rhs: Rational, strict: bool) -> Row {
        let g = coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !g.is_zero() && !g.is_one() {
            for c in coeffs.iter_mut() {
                *c /= &g;
            }
            rhs /= Rational::from_integer(g);
        }
        Row { coeffs, rhs, strict }
    }

    fn into_constraint(self) -> LinearConstraint {
        let relation = if self.strict { Relation::Lt } else { Relation::Le };
        LinearConstraint::new(self.coeffs.into_iter().map(Rational::from_integer).collect(), relation, self.rhs)
    }
}

/// `x_var = coeffs · x + constant` (with `coeffs[var] = 0`).
#[derive(Clone, Debug)]
struct Substitution {
    var: usize,
    coeffs: Vec<Rational>,
    constant: Rational,
}

/// Record of one full elimination run.
#[derive(Debug)]
struct Tower {
    dim: usize,
    substitutions: Vec<Substitution>,
    /// `(eliminated variable, rows before its elimination)`
    stages: Vec<(usize, Vec<Row>)>,
    /// Rows left after elimination; they only involve kept variables.
    residual: Vec<Row>,
}

impl Tower {
    /// Builds the tower, eliminating every variable not flagged in `keep`.
    /// Returns `None` when infeasibility is detected along the way.
    fn build(dim: usize, constraints: &[LinearConstraint], keep: &[bool]) -> Option<Tower> {
        debug_assert_eq!(keep.len(), dim);
        let mut equalities: Vec<(Vec<Rational>, Rational)> = Vec::new();
        let mut rows: Vec<(Vec<Rational>, Rational, bool)> = Vec::new();
        for c in constraints {
            match c.relation {
                Relation::Eq => equalities.push((c.coefficients.clone(), c.rhs.clone())),
                Relation::Le | Relation::Lt => {
                    rows.push((c.coefficients.clone(), c.rhs.clone(), c.relation == Relation::Lt))
                }
            }
        }

        let mut substituted = vec![false; dim];
        let mut substitutions = Vec::new();
        for i in 0..equalities.len() {
            let (a, b) = equalities[i].clone();
            let pivot = (0..dim).find(|&v| !keep[v] && !a[v].is_zero());
            let Some(v) = pivot else {
                if a.iter().all(|x| x.is_zero()) {
                    if !b.is_zero() {
                        return None;
                    }
                } else {
                    rows.push((negate(&a), -&b, false));
                    rows.push((a, b, false));
                }
                continue;
            };
            let inv = a[v].recip();
            let mut coeffs: Vec<Rational> = a.iter().map(|x| -(x * &inv)).collect();
            coeffs[v] = Rational::zero();
            let sub = Substitution {
                var: v,
                coeffs,
                constant: &b * &inv,
            };
            for (eq_a, eq_b) in equalities.iter_mut().skip(i + 1) {
                apply_substitution(eq_a, eq_b, &sub);
            }
            for (coeffs, rhs, _) in rows.iter_mut() {
                apply_substitution(coeffs, rhs, &sub);
            }
            substituted[v] = true;
            substitutions.push(sub);
        }

        let rows: Vec<Row> = rows.into_iter().map(|(a, b, strict)| Row::new(&a, b, strict)).collect();
        let mut rows = prune(rows)?;
        let mut stages = Vec::new();
        loop {
            let candidates: Vec<usize> = (0..dim)
                .filter(|&v| !keep[v] && !substituted[v])
                .filter(|&v| rows.iter().any(|r| !r.coeffs[v].is_zero()))
                .collect();
            // Eliminate the variable producing the fewest new rows.
            let Some(&v) = candidates.iter().min_by_key(|&&v| {
                let pos = rows.iter().filter(|r| r.coeffs[v].is_positive()).count();
                let neg = rows.iter().filter(|r| r.coeffs[v].is_negative()).count();
                (pos * neg) as isize - (pos + neg) as isize
            }) else {
                break;
            };
            let next = eliminate_rows(&rows, v);
            stages.push((v, rows));
            rows = prune(next)?;
        }
        Some(Tower {
            dim,
            substitutions,
            stages,
            residual: rows,
        })
    }

    /// Back-substitutes through the tower given values for kept variables
    /// (all other entries of `x` are ignored and overwritten).
    fn witness(&self, mut x: Vec<Rational>) -> Vec<Rational> {
        debug_assert_eq!(x.len(), self.dim);
        for (v, rows) in self.stages.iter().rev() {
            let interval = bounds_on(rows, *v, &x);
            debug_assert!(!interval.is_empty(), "empty interval during back-substitution");
            x[*v] = interval.pick();
        }
        for sub in self.substitutions.iter().rev() {
            x[sub.var] = dot(&sub.coeffs, &x) + &sub.constant;
        }
        x
    }
}

fn apply_substitution(coeffs: &mut [Rational], rhs: &mut Rational, sub: &Substitution) {
    let factor = coeffs[sub.var].clone();
    if factor.is_zero() {
        return;
    }
    for (c, s) in coeffs.iter_mut().zip(&sub.coeffs) {
        *c += &factor * s;
    }
    coeffs[sub.var] = Rational::zero();
    *rhs -= &factor * &sub.constant;
}

/// Interval of values for `x_var` allowed by `rows` with the other
/// coordinates fixed to `x`.
fn bounds_on(rows: &[Row], var: usize, x: &[Rational]) -> Interval {
    let mut interval = Interval::unbounded();
    for row in rows {
        let c = &row.coeffs[var];
        if c.is_zero() {
            continue;
        }
        let rest: Rational = row
            .coeffs
            .iter()
            .zip(x)
            .enumerate()
            .filter(|(i, (a, _))| *i != var && !a.is_zero())
            .fold(Rational::zero(), |acc, (_, (a, b))| acc + b * Rational::from_integer(a.clone()));
        let value = (&row.rhs - rest) / Rational::from_integer(c.clone());
        if c.is_positive() {
            interval.tighten_upper(value, row.strict);
        } else {
            interval.tighten_lower(value, row.strict);
        }
    }
    interval
}

/// One Fourier–Motzkin step on `var`.
fn eliminate_rows(rows: &[Row], var: usize) -> Vec<Row> {
    let mut out = Vec::new();
    let (mut upper, mut lower) = (Vec::new(), Vec::new());
    for row in rows {
        let c = &row.coeffs[var];
        if c.is_zero() {
            out.push(row.clone());
        } else if c.is_positive() {
            upper.push(row);
        } else {
            lower.push(row);
        }
    }
    for u in &upper {
        for l in &lower {
            let wu = -&l.coeffs[var];
            let wl = u.coeffs[var].clone();
            let mut coeffs: Vec<BigInt> = u
                .coeffs
                .iter()
                .zip(&l.coeffs)
                .map(|(a, b)| &wu * a + &wl * b)
                .collect();
            coeffs[var] = BigInt::zero();
            let rhs = &u.rhs * Rational::from_integer(wu) + &l.rhs * Rational::from_integer(wl);
            out.push(Row::primitive(coeffs, rhs, u.strict || l.strict));
        }
    }
    out
}

/// Drops trivially satisfied rows and dominated duplicates; `None` when a
/// trivially violated row shows up.
fn prune(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut best: BTreeMap<Vec<BigInt>, (Rational, bool)> = BTreeMap::new();
    for row in rows {
        if row.coeffs.iter().all(|c| c.is_zero()) {
            let ok = if row.strict {
                row.rhs.is_positive()
            } else {
                !row.rhs.is_negative()
            };
            if !ok {
                return None;
            }
            continue;
        }
        match best.get_mut(&row.coeffs) {
            None => {
                best.insert(row.coeffs, (row.rhs, row.strict));
            }
            Some((r, s)) => {
                if row.rhs < *r {
                    *r = row.rhs;
                    *s = row.strict;
                } else if row.rhs == *r {
                    *s |= row.strict;
                }
            }
        }
    }
    Some(
        best.into_iter()
            .map(|(coeffs, (rhs, strict))| Row { coeffs, rhs, strict })
            .collect(),
    )
}

/// A conjunction of linear constraints over `Q^ambient_dim`. Strict
/// constraints make the feasible set half-open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfOpenPolyhedron {
    ambient_dim: usize,
    constraints: Vec<LinearConstraint>,
}

impl HalfOpenPolyhedron {
    pub fn new(ambient_dim: usize) -> Self {
        HalfOpenPolyhedron {
            ambient_dim,
            constraints: Vec::new(),
        }
    }

    pub fn from_constraints(ambient_dim: usize, constraints: Vec<LinearConstraint>) -> Result<Self> {
        let mut sys = Self::new(ambient_dim);
        for c in constraints {
            sys.push(c)?;
        }
        Ok(sys)
    }

    pub fn push(&mut self, c: LinearConstraint) -> Result<()> {
        if c.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "constraint has {} coefficients, system has dimension {}",
                c.dim(),
                self.ambient_dim
            )));
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.ambient_dim && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }

    /// A rational point satisfying every constraint as typed, if one exists.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let keep = vec![false; self.ambient_dim];
        let tower = Tower::build(self.ambient_dim, &self.constraints, &keep)?;
        let x = tower.witness(vec![Rational::zero(); self.ambient_dim]);
        debug_assert!(self.contains(&x), "witness violates the system");
        Some(x)
    }

    pub fn is_feasible(&self) -> bool {
        let keep = vec![false; self.ambient_dim];
        Tower::build(self.ambient_dim, &self.constraints, &keep).is_some()
    }

    /// Exact range of `objective · x` over the feasible set, or `None` when
    /// the system is infeasible.
    pub fn range(&self, objective: &[Rational]) -> Option<Interval> {
        assert_eq!(objective.len(), self.ambient_dim);
        let dim = self.ambient_dim + 1;
        let extend = |v: &[Rational], last: Rational| {
            let mut out = v.to_vec();
            out.push(last);
            out
        };
        let mut constraints: Vec<LinearConstraint> = self
            .constraints
            .iter()
            .map(|c| LinearConstraint::new(extend(&c.coefficients, Rational::zero()), c.relation, c.rhs.clone()))
            .collect();
        // s - objective · x = 0
        constraints.push(LinearConstraint::eq(
            extend(&negate(objective), Rational::one()),
            Rational::zero(),
        ));
        let mut keep = vec![false; dim];
        keep[dim - 1] = true;
        let tower = Tower::build(dim, &constraints, &keep)?;
        let interval = bounds_on(&tower.residual, dim - 1, &vec![Rational::zero(); dim]);
        (!interval.is_empty()).then_some(interval)
    }

    /// Indices of constraints holding with equality on the whole feasible
    /// set. Equality constraints are always included; strict ones never are.
    pub fn implicit_equalities(&self) -> Result<BTreeSet<usize>> {
        Ok(self.analyze(None)?.0)
    }

    /// As [`Self::implicit_equalities`], with a known feasible point used to
    /// rule out constraints it satisfies strictly. An infeasible hint is
    /// ignored.
    pub fn implicit_equalities_with_hint(&self, hint: &[Rational]) -> Result<BTreeSet<usize>> {
        let hint = self.contains(hint).then_some(hint);
        Ok(self.analyze(hint)?.0)
    }

    /// Dimension of the affine hull of the feasible set.
    pub fn affine_dimension(&self) -> Result<usize> {
        let implicit = self.implicit_equalities()?;
        Ok(self.ambient_dim - self.normal_rank(&implicit))
    }

    /// Rank of the normals of the given constraints.
    pub fn normal_rank(&self, indices: &BTreeSet<usize>) -> usize {
        let normals: Vec<Vec<Rational>> = indices
            .iter()
            .map(|&i| self.constraints[i].coefficients.clone())
            .collect();
        rational_rank(&RatMatrix::from_rows(normals, self.ambient_dim))
    }

    /// A feasible point satisfying every non-implicit inequality strictly.
    pub fn relative_interior_witness(&self) -> Result<Vec<Rational>> {
        Ok(self.relative_interior()?.1)
    }

    /// Implicit equalities together with a relative-interior witness.
    ///
    /// The witness averages a base point with one point per non-implicit `≤`
    /// constraint that is strict there; by convexity the average is strict
    /// on every non-implicit constraint.
    pub fn relative_interior(&self) -> Result<(BTreeSet<usize>, Vec<Rational>)> {
        let (implicit, points) = self.analyze(None)?;
        let count = Rational::from_integer(BigInt::from(points.len()));
        let mut avg = vec![Rational::zero(); self.ambient_dim];
        for p in &points {
            for (a, x) in avg.iter_mut().zip(p) {
                *a += x;
            }
        }
        for a in avg.iter_mut() {
            *a /= &count;
        }
        debug_assert!(self
            .constraints
            .iter()
            .enumerate()
            .all(|(i, c)| implicit.contains(&i) || c.is_strictly_satisfied_by(&avg)));
        Ok((implicit, avg))
    }

    /// Tests each `≤` constraint for being implicit by making it strict.
    /// Constraints already strict at a known feasible point are skipped.
    /// Returns the implicit set and the feasible points found on the way;
    /// every non-implicit inequality is strict at one of them.
    fn analyze(&self, hint: Option<&[Rational]>) -> Result<(BTreeSet<usize>, Vec<Vec<Rational>>)> {
        let base = match hint {
            Some(h) => h.to_vec(),
            None => self.feasible_point().ok_or(Error::EmptySystem)?,
        };
        let mut settled: Vec<bool> = self
            .constraints
            .iter()
            .map(|c| c.relation != Relation::Le || c.is_strictly_satisfied_by(&base))
            .collect();
        let mut points = vec![base];
        let mut implicit: BTreeSet<usize> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.relation == Relation::Eq)
            .map(|(i, _)| i)
            .collect();
        for i in 0..self.constraints.len() {
            if settled[i] {
                continue;
            }
            let c = &self.constraints[i];
            match self.with_replaced(i, c.with_relation(Relation::Lt)).feasible_point() {
                None => {
                    implicit.insert(i);
                }
                Some(w) => {
                    for (s, c) in settled.iter_mut().zip(&self.constraints) {
                        if c.relation == Relation::Le && c.is_strictly_satisfied_by(&w) {
                            *s = true;
                        }
                    }
                    points.push(w);
                }
            }
        }
        Ok((implicit, points))
    }

    /// Projects out `var` with one Fourier–Motzkin step. Equalities are
    /// first split into pairs of inequalities. The result keeps the same
    /// ambient dimension with a zero column at `var`.
    pub fn eliminate_variable(&self, var: usize) -> HalfOpenPolyhedron {
        let mut rows = Vec::new();
        for c in &self.constraints {
            match c.relation {
                Relation::Eq => {
                    rows.push(Row::new(&c.coefficients, c.rhs.clone(), false));
                    rows.push(Row::new(&negate(&c.coefficients), -&c.rhs, false));
                }
                Relation::Le | Relation::Lt => {
                    rows.push(Row::new(&c.coefficients, c.rhs.clone(), c.relation == Relation::Lt))
                }
            }
        }
        let constraints = eliminate_rows(&rows, var).into_iter().map(Row::into_constraint).collect();
        HalfOpenPolyhedron {
            ambient_dim: self.ambient_dim,
            constraints,
        }
    }

    fn with_replaced(&self, index: usize, c: LinearConstraint) -> HalfOpenPolyhedron {
        let mut out = self.clone();
        out.constraints[index] = c;
        out
    }
}
