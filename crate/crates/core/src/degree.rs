//! Topological degree by boundary winding, the degree formula, the
//! auxiliary-map identity and distributional Jacobians.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::Bump;
use crate::error::{Error, Result};
use crate::geometry::{Point2, Rect2, P2};
use crate::maps::{integrate_patches, AuxMap, LevelMap, PlanarMap};
use crate::quadrature::{integrate_rect, polygon_area, Integral};

/// Closed polyline; `vertices[0] == vertices[last]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub vertices: Vec<P2>,
}

impl BoundaryCurve {
    /// Closes `pts` if needed. Needs at least three distinct points.
    pub fn from_points(mut pts: Vec<P2>) -> Result<Self> {
        if pts.len() < 3 {
            return Err(Error::InvalidArgument("curve needs three points".into()));
        }
        if pts[0] != pts[pts.len() - 1] {
            pts.push(pts[0]);
        }
        Ok(BoundaryCurve { vertices: pts })
    }

    /// Counter-clockwise boundary of `r` with `per_side` segments per edge.
    pub fn rectangle(r: &Rect2<f64>, per_side: usize) -> Self {
        let n = per_side.max(1);
        let c = r.corners();
        let mut v = Vec::with_capacity(4 * n + 1);
        for i in 0..4 {
            let (a, b) = (c[i], c[(i + 1) % 4]);
            for j in 0..n {
                v.push(a.lerp(&b, j as f64 / n as f64));
            }
        }
        v.push(c[0]);
        BoundaryCurve { vertices: v }
    }

    pub fn circle(center: P2, radius: f64, n: usize) -> Self {
        let n = n.max(3);
        let mut v: Vec<P2> = (0..n)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / n as f64;
                Point2::new(center.x1 + radius * th.cos(), center.x2 + radius * th.sin())
            })
            .collect();
        v.push(v[0]);
        BoundaryCurve { vertices: v }
    }

    pub fn signed_area(&self) -> f64 {
        polygon_area(&self.vertices[..self.vertices.len() - 1])
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        BoundaryCurve { vertices: v }
    }

    /// Inserts segment midpoints, doubling the vertex count.
    pub fn refined(&self) -> Self {
        let mut v = Vec::with_capacity(2 * self.vertices.len());
        for w in self.vertices.windows(2) {
            v.push(w[0]);
            v.push(w[0].lerp(&w[1], 0.5));
        }
        v.push(self.vertices[self.vertices.len() - 1]);
        BoundaryCurve { vertices: v }
    }

    pub fn bbox(&self) -> Rect2<f64> {
        bbox(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        self.bbox().diameter()
    }
}

pub(crate) fn bbox(pts: &[P2]) -> Rect2<f64> {
    let mut lo = pts[0];
    let mut hi = pts[0];
    for p in pts {
        lo.x1 = lo.x1.min(p.x1);
        lo.x2 = lo.x2.min(p.x2);
        hi.x1 = hi.x1.max(p.x1);
        hi.x2 = hi.x2.max(p.x2);
    }
    Rect2 { lo, hi }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingOptions {
    /// Minimal distance from `y` to the boundary image, relative to the
    /// diameter of the curve.
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions {
            rel_tol: 1e-6,
            max_evals: 4_000_000,
        }
    }
}

/// `deg(map, U, y)` as the winding number of `map ∘ ∂U` around `y`.
pub fn winding_degree<M: PlanarMap + ?Sized>(
    map: &M,
    curve: &BoundaryCurve,
    y: P2,
) -> Result<i64> {
    winding_degree_with(map, curve, y, WindingOptions::default())
}

pub fn winding_degree_with<M: PlanarMap + ?Sized>(
    map: &M,
    curve: &BoundaryCurve,
    y: P2,
    opts: WindingOptions,
) -> Result<i64> {
    let tol = opts.rel_tol * curve.diameter().max(f64::MIN_POSITIVE);
    let mut evals = 0usize;
    let mut image = |p: P2, evals: &mut usize| -> Result<P2> {
        *evals += 1;
        if *evals > opts.max_evals {
            return Err(Error::NonConvergent {
                what: "winding number",
                detail: format!("more than {} evaluations", opts.max_evals),
            });
        }
        let w = map.eval(p).sub(&y);
        let d = w.norm();
        if d < tol {
            return Err(Error::TooCloseToImage { distance: d });
        }
        Ok(w)
    };
    let mut total = 0.0;
    let mut prev = image(curve.vertices[0], &mut evals)?;
    for seg in curve.vertices.windows(2) {
        let next = image(seg[1], &mut evals)?;
        total += segment_angle(&mut image, &mut evals, seg[0], prev, seg[1], next, 0)?;
        prev = next;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.1 {
        return Err(Error::NonConvergent {
            what: "winding number",
            detail: format!("accumulated {turns} turns"),
        });
    }
    Ok(rounded as i64)
}

fn segment_angle<F>(
    image: &mut F,
    evals: &mut usize,
    p: P2,
    wp: P2,
    q: P2,
    wq: P2,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(P2, &mut usize) -> Result<P2>,
{
    let ang = wp.cross(&wq).atan2(wp.dot(&wq));
    if ang.abs() <= PI / 2.0 {
        return Ok(ang);
    }
    if depth >= 60 {
        return Err(Error::NonConvergent {
            what: "winding number",
            detail: "segment refinement depth exhausted".into(),
        });
    }
    let m = p.lerp(&q, 0.5);
    let wm = image(m, evals)?;
    Ok(segment_angle(image, evals, p, wp, m, wm, depth + 1)?
        + segment_angle(image, evals, m, wm, q, wq, depth + 1)?)
}

/// Image of the curve under `map`, refined until consecutive image points
/// are at most `max_seg` apart.
pub fn image_polyline<M: PlanarMap + ?Sized>(
    map: &M,
    curve: &BoundaryCurve,
    max_seg: f64,
) -> Vec<P2> {
    let mut out = vec![map.eval(curve.vertices[0])];
    for seg in curve.vertices.windows(2) {
        refine_segment(map, seg[0], seg[1], *out.last().unwrap(), map.eval(seg[1]), max_seg, 0, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn refine_segment<M: PlanarMap + ?Sized>(
    map: &M,
    p: P2,
    q: P2,
    fp: P2,
    fq: P2,
    max_seg: f64,
    depth: u32,
    out: &mut Vec<P2>,
) {
    if fp.dist(&fq) <= max_seg || depth >= 40 {
        out.push(fq);
        return;
    }
    let m = p.lerp(&q, 0.5);
    let fm = map.eval(m);
    refine_segment(map, p, m, fp, fm, max_seg, depth + 1, out);
    refine_segment(map, m, q, fm, fq, max_seg, depth + 1, out);
}

/// Winding numbers of a closed polyline around the centres of an
/// `n1 × n2` grid over `r`, by signed crossing counts along rows.
/// Row-major, first row at the bottom.
pub fn winding_grid(poly: &[P2], r: &Rect2<f64>, n1: usize, n2: usize) -> Vec<i32> {
    let (h1, h2) = (r.width() / n1 as f64, r.height() / n2 as f64);
    (0..n2)
        .into_par_iter()
        .flat_map_iter(|j| {
            let yr = r.lo.x2 + (j as f64 + 0.5) * h2;
            let mut xs: Vec<(f64, i32)> = poly
                .windows(2)
                .filter_map(|s| {
                    let (a, b) = (s[0], s[1]);
                    if (a.x2 <= yr) == (b.x2 <= yr) {
                        return None;
                    }
                    let x = a.x1 + (yr - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2);
                    Some((x, if b.x2 > a.x2 { 1 } else { -1 }))
                })
                .collect();
            xs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut right: i32 = xs.iter().map(|c| c.1).sum();
            let mut idx = 0;
            (0..n1)
                .map(|i| {
                    let xc = r.lo.x1 + (i as f64 + 0.5) * h1;
                    while idx < xs.len() && xs[idx].0 <= xc {
                        right -= xs[idx].1;
                        idx += 1;
                    }
                    right
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub quadrature_error: f64,
    pub warnings: Vec<String>,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64, quadrature_error: f64) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            quadrature_error,
            warnings: Vec::new(),
        }
    }
}

/// `∫_U η(f(x)) J_f(x) dx` against `∫ η(y) deg(f, U, y) dy`.
///
/// The right side partitions the support of `η` into `cells × cells`
/// squares and uses the degree at each centre.
pub fn degree_formula_check<M: PlanarMap + ?Sized>(
    map: &M,
    u: &Rect2<f64>,
    eta: &Bump,
    tol: f64,
    cells: usize,
) -> Result<IdentityCheck> {
    let supp = eta.support();
    let margin = supp.width().min(supp.height()) / 16.0;
    let curve = BoundaryCurve::rectangle(u, 64);
    let img = image_polyline(map, &curve, margin);
    let grown = Rect2::centered(&supp.center(), &(supp.width() / 2.0 + margin), &(supp.height() / 2.0 + margin));
    if img.iter().any(|p| crate::geometry::rect_contains(&grown, p, true)) {
        return Err(Error::SupportViolation);
    }
    let lhs = integrate_patches(map, u, tol, |p, x| {
        eta.eval(map.patch_eval(p, x)) * map.patch_grad(p, x).det()
    });
    let n = cells.max(1);
    let (w, h) = (supp.width() / n as f64, supp.height() / n as f64);
    let parts = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx % n, idx / n);
            let cell = Rect2::from_bounds(
                supp.lo.x1 + i as f64 * w,
                supp.lo.x1 + (i + 1) as f64 * w,
                supp.lo.x2 + j as f64 * h,
                supp.lo.x2 + (j + 1) as f64 * h,
            )?;
            let deg = winding_degree(map, &curve, cell.center())?;
            let q = integrate_rect(&|y| eta.eval(y), &cell, tol / (n * n) as f64);
            Ok(Integral {
                value: deg as f64 * q.value,
                error: (deg as f64).abs() * q.error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rhs: Integral = parts.into_iter().sum();
    Ok(IdentityCheck::new(lhs.value, rhs.value, lhs.error + rhs.error))
}

/// `∫ deg(g, U, z) dz` against `D_1 f_1(U)` for `g(x) = (f_1(x), x_2)`.
/// The left side scans an `grid_n × grid_n` grid of `z`.
pub fn aux_degree_identity<M: PlanarMap + ?Sized>(
    f: &M,
    u: &Rect2<f64>,
    grid_n: usize,
    tol: f64,
) -> Result<IdentityCheck> {
    let g = AuxMap(f);
    let curve = BoundaryCurve::rectangle(u, 64);
    let probe = image_polyline(&g, &curve, u.diameter() / 64.0);
    let bb = bbox(&probe);
    let pad = 0.01 * bb.diameter().max(1e-12);
    let bb = Rect2::centered(&bb.center(), &(bb.width() / 2.0 + pad), &(bb.height() / 2.0 + pad));
    let h = bb.width().max(bb.height()) / grid_n as f64;
    let img = image_polyline(&g, &curve, h / 4.0);
    let wind = winding_grid(&img, &bb, grid_n, grid_n);
    let cell = bb.area() / (grid_n * grid_n) as f64;
    let lhs = wind.iter().map(|&w| w as i64).sum::<i64>() as f64 * cell;
    let rhs = integrate_patches(f, u, tol, |p, x| f.patch_grad(p, x).m11);
    let mut out = IdentityCheck::new(lhs, rhs.value, rhs.error);
    // horizontal edges map into horizontal lines; report fold-backs
    for x2 in [u.lo.x2, u.hi.x2] {
        let vals: Vec<f64> = (0..=256)
            .map(|i| f.eval(Point2::new(u.lo.x1 + u.width() * i as f64 / 256.0, x2)).x1)
            .collect();
        let up = vals.windows(2).any(|w| w[1] > w[0] + 1e-14);
        let down = vals.windows(2).any(|w| w[1] < w[0] - 1e-14);
        if up && down {
            out.warnings
                .push(format!("image of edge x2 = {x2} folds back on itself"));
        }
    }
    if polygon_area(&img).abs() < 1e-12 {
        out.warnings.push("boundary image encloses no area".into());
    }
    Ok(out)
}

/// `⟨Det Df, φ⟩ = -∫ f_1 (∂_1 φ ∂_2 f_2 - ∂_2 φ ∂_1 f_2) dx`.
pub fn distributional_jacobian<M: PlanarMap + ?Sized>(
    f: &M,
    phi: &Bump,
    tol: f64,
) -> Integral {
    let supp = phi.support();
    integrate_patches(f, &supp, tol, |p, x| {
        let y = f.patch_eval(p, x);
        let g = f.patch_grad(p, x);
        let d = phi.grad(x);
        -y.x1 * (d.x1 * g.m22 - d.x2 * g.m21)
    })
}

/// `∫_{Q_0} φ(f_k(y)) dy`, which equals `∫ φ(f^{-1}(y)) dy` for both
/// orientations of a level map.
pub fn pullback_integral(map: &LevelMap, phi: &Bump, tol: f64) -> Integral {
    let base = LevelMap::new(map.k);
    integrate_patches(&base, &Rect2::unit_square(), tol, |p, x| {
        phi.eval(base.patch_eval(p, x))
    })
}

/// `|f(E)|` by counting grid cells of side `2 / grid_n` whose centre `y`
/// satisfies `f^{-1}(y) ∈ E`.
pub fn image_area<M: PlanarMap + ?Sized>(f: &M, e: &Rect2<f64>, grid_n: usize) -> Result<f64> {
    let probe = Point2::new(e.center().x1, e.center().x2);
    f.inverse(f.eval(probe))
        .ok_or_else(|| Error::NoInverse(f.name()))?;
    let h = 2.0 / grid_n as f64;
    let img = image_polyline(f, &BoundaryCurve::rectangle(e, 256), h);
    let bb = bbox(&img);
    let (i0, i1) = ((bb.lo.x1 / h).floor() as i64 - 1, (bb.hi.x1 / h).ceil() as i64 + 1);
    let (j0, j1) = ((bb.lo.x2 / h).floor() as i64 - 1, (bb.hi.x2 / h).ceil() as i64 + 1);
    let count: u64 = (j0..j1)
        .into_par_iter()
        .map(|j| {
            let y2 = (j as f64 + 0.5) * h;
            (i0..i1)
                .filter(|&i| {
                    let y = Point2::new((i as f64 + 0.5) * h, y2);
                    f.inverse(y)
                        .is_some_and(|x| crate::geometry::rect_contains(e, &x, true))
                })
                .count() as u64
        })
        .sum();
    Ok(count as f64 * h * h)
}

/// Riemann–Stieltjes sum `∮ u dv` along a closed polyline, doubling the
/// vertex count until successive sums differ by less than `tol`.
pub fn stieltjes_integral<U, V>(u: U, v: V, curve: &BoundaryCurve, tol: f64) -> Result<f64>
where
    U: Fn(P2) -> f64 + Sync,
    V: Fn(P2) -> f64 + Sync,
{
    let sum = |c: &BoundaryCurve| -> f64 {
        c.vertices
            .windows(2)
            .map(|s| u(s[0].lerp(&s[1], 0.5)) * (v(s[1]) - v(s[0])))
            .sum()
    };
    let mut c = curve.clone();
    let mut prev = sum(&c);
    for _ in 0..20 {
        c = c.refined();
        let cur = sum(&c);
        if (cur - prev).abs() < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergent {
        what: "Stieltjes sum",
        detail: format!("last value {prev}"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetAreaCheck {
    /// `Det Df(E) = ∫_E J_f`.
    pub det: Integral,
    /// `|f(E)|` by rasterisation.
    pub area: f64,
    /// `∮_{∂E} f_1 df_2`.
    pub stieltjes: f64,
    pub residual: f64,
}

pub fn det_equals_area_check<M: PlanarMap + ?Sized>(
    f: &M,
    e: &Rect2<f64>,
    grid_n: usize,
    tol: f64,
) -> Result<DetAreaCheck> {
    let det = integrate_patches(f, e, tol, |p, x| f.patch_grad(p, x).det());
    let area = image_area(f, e, grid_n)?;
    let curve = BoundaryCurve::rectangle(e, 16);
    let stieltjes = stieltjes_integral(|x| f.eval(x).x1, |x| f.eval(x).x2, &curve, tol)?;
    Ok(DetAreaCheck {
        det,
        area,
        stieltjes,
        residual: (det.value - area).abs(),
    })
}
