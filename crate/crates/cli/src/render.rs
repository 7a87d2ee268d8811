//! Standalone SVG pictures: the oriented arrangement on a fundamental
//! domain of the torus, and the zonotope with its lattice points.
//!
//! Strata and the points of `Z` share colors, assigned from a fixed palette
//! in the order of the stratum table. Floating point is used only to place
//! shapes on the canvas.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use zonostrat_core::linalg::{Rational, RatMatrix};
use zonostrat_core::strata::Stratum;
use zonostrat_core::ZonotopePoint;

use crate::input::LoadedInstance;

pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#bcbd22", "#7f7f7f",
    "#393b79", "#637939",
];
const GRAY: &str = "#b0b0b0";
const UNIT: f64 = 240.0;
const MARGIN: f64 = 24.0;
const HAIR: f64 = 6.0;

pub fn color(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

fn f(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

fn fi(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

struct Canvas {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
}

/// Three decimals, without a negative zero.
fn num(x: f64) -> String {
    let x = if x.abs() < 5e-4 { 0.0 } else { x };
    format!("{x:.3}")
}

impl Canvas {
    fn new() -> Self {
        Canvas {
            body: String::new(),
            min: (f64::INFINITY, f64::INFINITY),
            max: (f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn extend(&mut self, x: f64, y: f64, pad: f64) {
        self.min = (self.min.0.min(x - pad), self.min.1.min(y - pad));
        self.max = (self.max.0.max(x + pad), self.max.1.max(y + pad));
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        self.extend(a.0, a.1, width);
        self.extend(b.0, b.1, width);
        let _ = writeln!(
            self.body,
            r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{width}"/>"#,
            num(a.0),
            num(a.1),
            num(b.0),
            num(b.1)
        );
    }

    fn dot(&mut self, c: (f64, f64), r: f64, fill: &str) {
        self.extend(c.0, c.1, r + 1.0);
        let _ = writeln!(
            self.body,
            r#"  <circle cx="{}" cy="{}" r="{r}" fill="{fill}" stroke="black" stroke-width="0.5"/>"#,
            num(c.0),
            num(c.1)
        );
    }

    fn polygon(&mut self, points: &[(f64, f64)], stroke: &str) {
        for p in points {
            self.extend(p.0, p.1, 2.0);
        }
        let coords: Vec<String> = points.iter().map(|p| format!("{},{}", num(p.0), num(p.1))).collect();
        let _ = writeln!(
            self.body,
            r#"  <polygon points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
    }

    fn finish(self, title: &str) -> String {
        let (x0, y0) = (self.min.0 - MARGIN, self.min.1 - MARGIN);
        let (w, h) = (self.max.0 - self.min.0 + 2.0 * MARGIN, self.max.1 - self.min.1 + 2.0 * MARGIN);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0:.3} {y0:.3} {w:.3} {h:.3}\">\n  <title>{}</title>\n{}</svg>\n",
            escape(title),
            self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Coordinates `t` of `y = Σ t_i b_i` in the basis of the translation
/// lattice, reduced into `[0, 1)`.
fn domain_coordinates(basis: &RatMatrix, y: &[Rational]) -> Vec<Rational> {
    let bt = basis.transpose();
    let t = zonostrat_core::linalg::solve_rational(&bt, y).expect("witness lies in the span of the basis");
    t.into_iter().map(|x| &x - x.floor()).collect()
}

/// The arrangement on the fundamental domain `[0,1]^n` of the torus, for
/// full-rank instances with `n ≤ 2`.
pub fn arrangement_svg(input: &LoadedInstance, strata: &[Stratum]) -> Result<String, String> {
    let inst = &input.instance;
    if inst.n() > 2 {
        return Err(format!("arrangement picture skipped: needs n <= 2, got n = {}", inst.n()));
    }
    if !inst.is_full_rank() {
        return Err(format!(
            "arrangement picture skipped: rank {} is less than n = {}",
            inst.rank(),
            inst.n()
        ));
    }
    let basis = &inst.preimage().basis;
    let weights: Vec<Vec<Rational>> = (0..inst.k())
        .map(|j| {
            let v: Vec<Rational> = inst.vector(j).iter().map(|x| Rational::from_integer(x.clone())).collect();
            basis.mul_vec(&v)
        })
        .collect();
    let mut canvas = Canvas::new();
    let place = |t: &[f64]| -> (f64, f64) {
        match t.len() {
            1 => (t[0] * UNIT, 0.0),
            _ => (t[0] * UNIT, (1.0 - t[1]) * UNIT),
        }
    };

    if inst.n() == 1 {
        canvas.line(place(&[0.0]), place(&[1.0]), "black", 1.5);
        for w in &weights {
            let w = &w[0];
            let sign = if w > &Rational::zero() { 1.0 } else { -1.0 };
            let (lo, hi) = if w > &Rational::zero() {
                (Rational::zero(), w.clone())
            } else {
                (w.clone(), Rational::zero())
            };
            let mut c = lo.ceil();
            while c <= hi {
                let t = f(&(&c / w));
                let at = place(&[t]);
                canvas.line((at.0, at.1 - 10.0), (at.0, at.1 + 10.0), "black", 1.5);
                canvas.line((at.0, at.1 - 8.0), (at.0 + sign * HAIR, at.1 - 8.0), "black", 1.0);
                c += Rational::from_integer(1.into());
            }
        }
    } else {
        let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let square: Vec<(f64, f64)> = corners.iter().map(|c| place(c)).collect();
        canvas.polygon(&square, "black");
        for w in &weights {
            draw_lines(&mut canvas, w, &place);
        }
    }

    for (i, s) in strata.iter().enumerate() {
        let t: Vec<f64> = domain_coordinates(basis, &s.witness).iter().map(f).collect();
        let r = 3.0 + s.lift_dim as f64;
        canvas.dot(place(&t), r, color(i));
    }
    let title = format!("{}: arrangement", input.name.as_deref().unwrap_or("instance"));
    Ok(canvas.finish(&title))
}

/// Lines `⟨t, w⟩ = c` across the unit square, with hairs on the side where
/// `⟨t, w⟩` grows.
fn draw_lines(canvas: &mut Canvas, w: &[Rational], place: &dyn Fn(&[f64]) -> (f64, f64)) {
    let corner_values = [Rational::zero(), w[0].clone(), &w[0] + &w[1], w[1].clone()];
    let lo = corner_values.iter().min().unwrap().ceil();
    let hi = corner_values.iter().max().unwrap().floor();
    let (w0, w1) = (f(&w[0]), f(&w[1]));
    let norm = (w0 * w0 + w1 * w1).sqrt();
    if norm == 0.0 {
        return;
    }
    let mut c = lo;
    while c <= hi {
        // Exact intersections with the four edges of the square.
        let mut ends: Vec<(Rational, Rational)> = Vec::new();
        for fixed in [0, 1] {
            for side in [Rational::zero(), Rational::from_integer(1.into())] {
                let other = 1 - fixed;
                if w[other].is_zero() {
                    continue;
                }
                let value = (&c - &w[fixed] * &side) / &w[other];
                if value >= Rational::zero() && value <= Rational::from_integer(1.into()) {
                    let point = if fixed == 0 { (side.clone(), value) } else { (value, side.clone()) };
                    if !ends.contains(&point) {
                        ends.push(point);
                    }
                }
            }
        }
        ends.sort();
        if ends.len() >= 2 {
            let a = place(&[f(&ends[0].0), f(&ends[0].1)]);
            let b = place(&[f(&ends[ends.len() - 1].0), f(&ends[ends.len() - 1].1)]);
            canvas.line(a, b, "black", 1.5);
            // Canvas direction of +w (the vertical axis is flipped).
            let dir = (w0 / norm, -w1 / norm);
            let length = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
            let hairs = (length / 12.0).floor().max(1.0) as usize;
            for h in 0..=hairs {
                let s = h as f64 / hairs as f64;
                let p = (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1));
                canvas.line(p, (p.0 + HAIR * dir.0, p.1 + HAIR * dir.1), "black", 0.75);
            }
        }
        c += Rational::from_integer(1.into());
    }
}

/// Monotone-chain convex hull of integer points, counterclockwise.
fn convex_hull(points: &[(BigInt, BigInt)]) -> Vec<(BigInt, BigInt)> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &(BigInt, BigInt), a: &(BigInt, BigInt), b: &(BigInt, BigInt)| -> BigInt {
        (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
    };
    let mut lower: Vec<(BigInt, BigInt)> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= BigInt::zero() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<(BigInt, BigInt)> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= BigInt::zero() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// The closed zonotope with its lattice points, for `k − r ≤ 2`. Points of
/// `Z` take the color of their stratum; the others are gray.
pub fn zonotope_svg(
    input: &LoadedInstance,
    strata: &[Stratum],
    closed: &[ZonotopePoint],
    printed: bool,
) -> Result<String, String> {
    let inst = &input.instance;
    let c = inst.codim();
    if c > 2 {
        return Err(format!("zonotope picture skipped: needs k - r <= 2, got k - r = {c}"));
    }
    let scale = UNIT / 4.0;
    let place = |p: &[BigInt]| -> (f64, f64) {
        match p.len() {
            0 => (0.0, 0.0),
            1 => (fi(&p[0]) * scale, 0.0),
            _ => (fi(&p[0]) * scale, -fi(&p[1]) * scale),
        }
    };
    let shown = |p: &[BigInt]| input.coordinates(p, printed);
    let mut canvas = Canvas::new();
    match c {
        2 => {
            let pts: Vec<(BigInt, BigInt)> = closed
                .iter()
                .map(|z| {
                    let q = shown(&z.p);
                    (q[0].clone(), q[1].clone())
                })
                .collect();
            let hull: Vec<(f64, f64)> = convex_hull(&pts).iter().map(|(x, y)| place(&[x.clone(), y.clone()])).collect();
            if hull.len() >= 3 {
                canvas.polygon(&hull, GRAY);
            } else if hull.len() == 2 {
                canvas.line(hull[0], hull[1], GRAY, 1.5);
            }
        }
        1 => {
            let xs: Vec<BigInt> = closed.iter().map(|z| shown(&z.p)[0].clone()).collect();
            let (lo, hi) = (xs.iter().min().unwrap().clone(), xs.iter().max().unwrap().clone());
            canvas.line(place(&[lo]), place(&[hi]), GRAY, 1.5);
        }
        _ => {}
    }
    for z in closed.iter().filter(|z| !z.in_half_open) {
        canvas.dot(place(&shown(&z.p)), 3.0, GRAY);
    }
    for (i, s) in strata.iter().enumerate() {
        canvas.dot(place(&shown(&s.point.p)), 5.0, color(i));
    }
    let title = format!("{}: zonotope", input.name.as_deref().unwrap_or("instance"));
    Ok(canvas.finish(&title))
}
