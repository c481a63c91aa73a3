//! Adaptive Gauss–Legendre quadrature on intervals, quadrilaterals and
//! convex polygons.
//!
//! Error estimates come from comparing two rule orders on the same cell.
//! Parallel sums collect per-cell results in order and add them
//! sequentially, so results do not depend on the thread count.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Point2, Rect2, P2};

/// A quadrature value and its estimated absolute error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

impl Integral {
    pub fn exact(value: f64) -> Self {
        Integral { value, error: 0.0 }
    }
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, o: Integral) -> Integral {
        Integral {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

impl std::iter::Sum for Integral {
    fn sum<I: Iterator<Item = Integral>>(iter: I) -> Integral {
        iter.fold(Integral::default(), |a, b| a + b)
    }
}

/// Sums in iteration order after a parallel map.
pub fn par_sum<T, F>(items: &[T], f: F) -> Integral
where
    T: Sync,
    F: Fn(&T) -> Integral + Sync + Send,
{
    let parts: Vec<Integral> = items.par_iter().map(f).collect();
    parts.into_iter().sum()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` via Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

pub const LOW_ORDER: usize = 6;
pub const HIGH_ORDER: usize = 10;
const MAX_DEPTH: u32 = 12;

fn rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static LOW: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static HIGH: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        LOW_ORDER => LOW.get_or_init(|| gauss_legendre(LOW_ORDER)),
        HIGH_ORDER => HIGH.get_or_init(|| gauss_legendre(HIGH_ORDER)),
        _ => unreachable!("only the two cached orders are used"),
    }
}

fn bilinear(q: &[P2; 4], s: f64, t: f64) -> (P2, f64) {
    // q in counter-clockwise order; (s, t) in [-1, 1]^2
    let w = [
        (1.0 - s) * (1.0 - t) / 4.0,
        (1.0 + s) * (1.0 - t) / 4.0,
        (1.0 + s) * (1.0 + t) / 4.0,
        (1.0 - s) * (1.0 + t) / 4.0,
    ];
    let x1 = w.iter().zip(q).map(|(w, p)| w * p.x1).sum();
    let x2 = w.iter().zip(q).map(|(w, p)| w * p.x2).sum();
    let ds = [-(1.0 - t), 1.0 - t, 1.0 + t, -(1.0 + t)];
    let dt = [-(1.0 - s), -(1.0 + s), 1.0 + s, 1.0 - s];
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..4 {
        a += ds[i] * q[i].x1 / 4.0;
        b += dt[i] * q[i].x1 / 4.0;
        c += ds[i] * q[i].x2 / 4.0;
        d += dt[i] * q[i].x2 / 4.0;
    }
    (Point2::new(x1, x2), (a * d - b * c).abs())
}

fn quad_rule<F: Fn(P2) -> f64>(f: &F, q: &[P2; 4], n: usize) -> f64 {
    let (xs, ws) = rule(n);
    let mut acc = 0.0;
    for (i, &s) in xs.iter().enumerate() {
        let mut row = 0.0;
        for (j, &t) in xs.iter().enumerate() {
            let (p, jac) = bilinear(q, s, t);
            if jac > 0.0 {
                row += ws[j] * f(p) * jac;
            }
        }
        acc += ws[i] * row;
    }
    acc
}

fn split4(q: &[P2; 4]) -> [[P2; 4]; 4] {
    let mid = |a: &P2, b: &P2| a.lerp(b, 0.5);
    let m01 = mid(&q[0], &q[1]);
    let m12 = mid(&q[1], &q[2]);
    let m23 = mid(&q[2], &q[3]);
    let m30 = mid(&q[3], &q[0]);
    let c = bilinear(q, 0.0, 0.0).0;
    [
        [q[0], m01, c, m30],
        [m01, q[1], m12, c],
        [c, m12, q[2], m23],
        [m30, c, m23, q[3]],
    ]
}

fn adapt_quad<F: Fn(P2) -> f64>(f: &F, q: &[P2; 4], tol: f64, depth: u32) -> Integral {
    let lo = quad_rule(f, q, LOW_ORDER);
    let hi = quad_rule(f, q, HIGH_ORDER);
    let err = (hi - lo).abs();
    if err <= tol || depth >= MAX_DEPTH {
        return Integral {
            value: hi,
            error: err,
        };
    }
    split4(q)
        .iter()
        .map(|s| adapt_quad(f, s, tol / 4.0, depth + 1))
        .sum()
}

/// Integral over a quadrilateral given counter-clockwise (a repeated vertex
/// turns it into a triangle).
pub fn integrate_quad<F: Fn(P2) -> f64>(f: &F, q: &[P2; 4], tol: f64) -> Integral {
    adapt_quad(f, q, tol, 0)
}

pub fn integrate_rect<F: Fn(P2) -> f64>(f: &F, r: &Rect2<f64>, tol: f64) -> Integral {
    let c = r.corners();
    integrate_quad(f, &c, tol)
}

/// Integral over a convex polygon (counter-clockwise), by splitting into
/// quadrilaterals fanned from the first vertex.
pub fn integrate_polygon<F: Fn(P2) -> f64>(f: &F, poly: &[P2], tol: f64) -> Integral {
    let n = poly.len();
    if n < 3 {
        return Integral::default();
    }
    if n == 4 {
        return integrate_quad(f, &[poly[0], poly[1], poly[2], poly[3]], tol);
    }
    let mut quads = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if i + 2 < n {
            quads.push([poly[0], poly[i], poly[i + 1], poly[i + 2]]);
            i += 2;
        } else {
            quads.push([poly[0], poly[i], poly[i + 1], poly[i + 1]]);
            i += 1;
        }
    }
    let total = polygon_area(poly).max(f64::MIN_POSITIVE);
    quads
        .iter()
        .map(|q| {
            let share = quad_area(q) / total;
            integrate_quad(f, q, tol * share.max(1e-3))
        })
        .sum()
}

/// Calls `visit(x, weight)` at the `s × s` midpoints of the bilinear image
/// of the reference square, with weights summing to the area of `q`.
pub fn quad_midpoints<V: FnMut(P2, f64)>(q: &[P2; 4], s: usize, visit: &mut V) {
    let h = 2.0 / s as f64;
    for i in 0..s {
        for j in 0..s {
            let (p, jac) = bilinear(q, -1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h);
            if jac > 0.0 {
                visit(p, jac * h * h);
            }
        }
    }
}

/// [`quad_midpoints`] over the quadrilateral fan of a convex polygon.
pub fn polygon_midpoints<V: FnMut(P2, f64)>(poly: &[P2], s: usize, visit: &mut V) {
    let n = poly.len();
    let mut i = 1;
    while i + 1 < n {
        let last = if i + 2 < n { poly[i + 2] } else { poly[i + 1] };
        quad_midpoints(&[poly[0], poly[i], poly[i + 1], last], s, visit);
        i += if i + 2 < n { 2 } else { 1 };
    }
}

fn quad_area(q: &[P2; 4]) -> f64 {
    polygon_area(q)
}

/// Signed shoelace area (positive for counter-clockwise polygons).
pub fn polygon_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].cross(&poly[(i + 1) % n]))
        .sum::<f64>()
        / 2.0
}

/// Sutherland–Hodgman clip of a convex polygon against a rectangle.
pub fn clip_to_rect(poly: &[P2], r: &Rect2<f64>) -> Vec<P2> {
    let mut out: Vec<P2> = poly.to_vec();
    // each edge: inside test value (>= 0 means inside)
    let planes: [(f64, f64, f64); 4] = [
        (1.0, 0.0, -r.lo.x1),
        (-1.0, 0.0, r.hi.x1),
        (0.0, 1.0, -r.lo.x2),
        (0.0, -1.0, r.hi.x2),
    ];
    for &(a, b, c) in &planes {
        if out.is_empty() {
            break;
        }
        let side = |p: &P2| a * p.x1 + b * p.x2 + c;
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = input[i];
            let prev = input[(i + n - 1) % n];
            let (sc, sp) = (side(&cur), side(&prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    out.push(prev.lerp(&cur, sp / (sp - sc)));
                }
                out.push(cur);
            } else if sp >= 0.0 {
                out.push(prev.lerp(&cur, sp / (sp - sc)));
            }
        }
    }
    dedup_polygon(out)
}

fn dedup_polygon(mut poly: Vec<P2>) -> Vec<P2> {
    poly.dedup_by(|a, b| a.dist(b) < 1e-15);
    while poly.len() > 1 && poly[0].dist(&poly[poly.len() - 1]) < 1e-15 {
        poly.pop();
    }
    poly
}

/// Adaptive Gauss on `[a, b]`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Integral {
    adapt_1d(f, a, b, tol, 0)
}

fn rule_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let (xs, ws) = rule(n);
    let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
    xs.iter().zip(ws).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

fn adapt_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Integral {
    let lo = rule_1d(f, a, b, LOW_ORDER);
    let hi = rule_1d(f, a, b, HIGH_ORDER);
    let err = (hi - lo).abs();
    if err <= tol || depth >= 2 * MAX_DEPTH {
        return Integral {
            value: hi,
            error: err,
        };
    }
    let m = (a + b) / 2.0;
    adapt_1d(f, a, m, tol / 2.0, depth + 1) + adapt_1d(f, m, b, tol / 2.0, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_weights_sum_to_area() {
        let pent = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.5, 0.8),
            Point2::new(0.5, 1.4),
            Point2::new(-0.3, 0.7),
        ];
        let mut w = 0.0;
        polygon_midpoints(&pent, 5, &mut |_, dw| w += dw);
        assert!((w - polygon_area(&pent)).abs() < 1e-12);
    }

    #[test]
    fn gauss_weights_sum_to_two_and_integrate_polynomials() {
        for n in [1, 2, 5, 6, 10] {
            let (xs, ws) = gauss_legendre(n);
            assert!((ws.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact for degree 2n - 1
            let deg = 2 * n - 1;
            let val: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let want = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((val - want).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn known_integrals() {
        let r = Rect2::from_bounds(0.0, 1.0, 0.0, 2.0).unwrap();
        let i = integrate_rect(&|p: P2| p.x1 * p.x2, &r, 1e-12);
        assert!((i.value - 1.0).abs() < 1e-12);

        let tri = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        let i = integrate_polygon(&|p: P2| p.x1, &tri, 1e-12);
        assert!((i.value - 1.0 / 6.0).abs() < 1e-12);

        let i = integrate_1d(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((i.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn adapts_to_kinks() {
        let r = Rect2::from_bounds(-1.0, 1.0, -1.0, 1.0).unwrap();
        let i = integrate_rect(&|p: P2| (p.x1 - 0.3).abs(), &r, 1e-8);
        // 2 * ∫|x - 0.3| = 2 * (1.3²/2 + 0.7²/2)
        assert!((i.value - (1.69 + 0.49)).abs() < 1e-7);
    }

    #[test]
    fn clipping() {
        let sq = Rect2::from_bounds(0.0, 1.0, 0.0, 1.0).unwrap();
        let big = Rect2::from_bounds(0.5, 2.0, -1.0, 0.5).unwrap();
        let c = clip_to_rect(&sq.polygon(), &big);
        assert!((polygon_area(&c) - 0.25).abs() < 1e-15);
        let far = Rect2::from_bounds(3.0, 4.0, 3.0, 4.0).unwrap();
        assert!(clip_to_rect(&sq.polygon(), &far).len() < 3);
    }
}
