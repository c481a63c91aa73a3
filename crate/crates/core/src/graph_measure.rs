//! The graph measure `μ` of a planar map on product windows.
//!
//! Components, in order: `μ_12 = |E|`, `μ^12 = |f(E)|`, `μ_1^j = D_2 f_j(E)`
//! and `μ_2^j = -D_1 f_j(E)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::Bump;
use crate::degree::image_area;
use crate::error::{Error, Result};
use crate::geometry::{Mat2, Point2, Rect2, P2};
use crate::maps::{integrate_patches, LevelMap, Orientation, PlanarMap};
use crate::pieces::{level_patches, Piece, PieceKind};
use crate::quadrature::{integrate_1d, Integral};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MuVector {
    pub mu12: f64,
    pub mu_up12: f64,
    pub mu_1_1: f64,
    pub mu_1_2: f64,
    pub mu_2_1: f64,
    pub mu_2_2: f64,
}

impl MuVector {
    pub fn components(&self) -> [f64; 6] {
        [
            self.mu12,
            self.mu_up12,
            self.mu_1_1,
            self.mu_1_2,
            self.mu_2_1,
            self.mu_2_2,
        ]
    }

    pub fn from_components(c: [f64; 6]) -> Self {
        MuVector {
            mu12: c[0],
            mu_up12: c[1],
            mu_1_1: c[2],
            mu_1_2: c[3],
            mu_2_1: c[4],
            mu_2_2: c[5],
        }
    }

    /// Density of `μ` at a point where `f` is differentiable with gradient `g`.
    pub fn density(g: &Mat2<f64>) -> Self {
        MuVector {
            mu12: 1.0,
            mu_up12: g.det().abs(),
            mu_1_1: g.m12,
            mu_1_2: g.m22,
            mu_2_1: -g.m11,
            mu_2_2: -g.m21,
        }
    }

    pub fn norm(&self) -> f64 {
        self.components().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_components(self.components().map(|c| c * s))
    }

    /// The `(κ_i^j)` block `[[μ_1^1, μ_1^2], [μ_2^1, μ_2^2]]`.
    pub fn gradient_block(&self) -> Mat2<f64> {
        Mat2::new(self.mu_1_1, self.mu_1_2, self.mu_2_1, self.mu_2_2)
    }
}

impl std::ops::Add for MuVector {
    type Output = MuVector;
    fn add(self, o: MuVector) -> MuVector {
        let (a, b) = (self.components(), o.components());
        MuVector::from_components(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl std::iter::Sum for MuVector {
    fn sum<I: Iterator<Item = MuVector>>(iter: I) -> MuVector {
        iter.fold(MuVector::default(), |a, b| a + b)
    }
}

/// `μ(Γ(E))` for a rectangle `E`: gradient components by quadrature over
/// smooth patches and `μ^12` by rasterising `f(E)`.
pub fn mu_on_cell<M: PlanarMap + ?Sized>(
    map: &M,
    e: &Rect2<f64>,
    grid_n: usize,
    tol: f64,
) -> Result<MuVector> {
    let comp = |sel: fn(&Mat2<f64>) -> f64| {
        integrate_patches(map, e, tol, move |p, x| sel(&map.patch_grad(p, x))).value
    };
    Ok(MuVector {
        mu12: e.area(),
        mu_up12: image_area(map, e, grid_n)?,
        mu_1_1: comp(|g| g.m12),
        mu_1_2: comp(|g| g.m22),
        mu_2_1: comp(|g| -g.m11),
        mu_2_2: comp(|g| -g.m21),
    })
}

/// As [`mu_on_cell`] with `μ^12 = ∫_E |J_f|` (area formula) instead of
/// rasterisation.
pub fn mu_on_cell_quadrature<M: PlanarMap + ?Sized>(map: &M, e: &Rect2<f64>, tol: f64) -> MuVector {
    let patches = map.patches(e);
    let total = e.area().max(f64::MIN_POSITIVE);
    let parts: Vec<MuVector> = patches
        .par_iter()
        .map(|p| {
            let t = tol * (p.area() / total).max(1e-6);
            let c = |sel: &(dyn Fn(&Mat2<f64>) -> f64 + Sync)| {
                crate::quadrature::integrate_polygon(&|x| sel(&map.patch_grad(p, x)), &p.poly, t).value
            };
            MuVector {
                mu12: p.area(),
                mu_up12: c(&|g| g.det().abs()),
                mu_1_1: c(&|g| g.m12),
                mu_1_2: c(&|g| g.m22),
                mu_2_1: c(&|g| -g.m11),
                mu_2_2: c(&|g| -g.m21),
            }
        })
        .collect();
    parts.into_iter().sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Ball,
    Square,
}

impl Shape {
    fn contains(self, c: &P2, r: f64, p: &P2) -> bool {
        match self {
            Shape::Ball => p.dist(c) < r,
            Shape::Square => (p.x1 - c.x1).abs() < r && (p.x2 - c.x2).abs() < r,
        }
    }
}

/// A product window `W_x(x0, r) × W_y(y0, r)` on the graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x0: P2,
    pub y0: P2,
    pub r: f64,
    pub x_shape: Shape,
    pub y_shape: Shape,
}

/// Result of sampling `μ` on a window.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WindowMeasure {
    /// `μ` of the whole window.
    pub mu: MuVector,
    /// Partition lower bound for `|μ|`: sum of per-cell Euclidean norms.
    pub total_variation: f64,
}

/// Samples `μ` on `window` with an `n × n` partition of the bounding
/// square of the `x` factor and `m × m` midpoint samples per cell. Samples
/// outside the closed unit square are dropped.
pub fn window_measure<M: PlanarMap + ?Sized>(map: &M, w: &Window, n: usize, m: usize) -> WindowMeasure {
    let h = 2.0 * w.r / n as f64;
    let hs = h / m as f64;
    let weight = hs * hs;
    let cells: Vec<MuVector> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % n, idx / n);
            let lo = Point2::new(w.x0.x1 - w.r + i as f64 * h, w.x0.x2 - w.r + j as f64 * h);
            let mut acc = MuVector::default();
            for a in 0..m {
                for b in 0..m {
                    let x = Point2::new(lo.x1 + (a as f64 + 0.5) * hs, lo.x2 + (b as f64 + 0.5) * hs);
                    if x.x1.abs() > 1.0 || x.x2.abs() > 1.0 || !w.x_shape.contains(&w.x0, w.r, &x) {
                        continue;
                    }
                    if !w.y_shape.contains(&w.y0, w.r, &map.eval(x)) {
                        continue;
                    }
                    if let Some(g) = map.grad(x) {
                        acc = acc + MuVector::density(&g).scaled(weight);
                    }
                }
            }
            acc
        })
        .collect();
    WindowMeasure {
        total_variation: cells.iter().map(MuVector::norm).sum(),
        mu: cells.into_iter().sum(),
    }
}

/// Samples `μ` on `window` over the smooth patches of `map`, which serve as
/// the partition for `|μ|`. Each patch is sampled at midpoints spaced at most
/// `r / per_radius` apart (and at least `min_side × min_side` per fan quad),
/// so thin patches are resolved regardless of their size.
pub fn window_measure_patches<M: PlanarMap + ?Sized>(
    map: &M,
    w: &Window,
    per_radius: usize,
    min_side: usize,
) -> WindowMeasure {
    let lo = Point2::new((w.x0.x1 - w.r).max(-1.0), (w.x0.x2 - w.r).max(-1.0));
    let hi = Point2::new((w.x0.x1 + w.r).min(1.0), (w.x0.x2 + w.r).min(1.0));
    let Ok(bbox) = Rect2::new(lo, hi) else {
        return WindowMeasure::default();
    };
    let spacing = w.r / per_radius as f64;
    let cells: Vec<MuVector> = map
        .patches(&bbox)
        .par_iter()
        .map(|patch| {
            let b = crate::degree::bbox(&patch.poly);
            let side = (b.width().max(b.height()) / spacing).ceil() as usize;
            let mut acc = MuVector::default();
            crate::quadrature::polygon_midpoints(&patch.poly, side.max(min_side), &mut |x, dw| {
                if w.x_shape.contains(&w.x0, w.r, &x)
                    && w.y_shape.contains(&w.y0, w.r, &map.patch_eval(patch, x))
                {
                    acc = acc + MuVector::density(&map.patch_grad(patch, x)).scaled(dw);
                }
            });
            acc
        })
        .collect();
    WindowMeasure {
        total_variation: cells.iter().map(MuVector::norm).sum(),
        mu: cells.into_iter().sum(),
    }
}

/// `|μ|(B(x0, r) × B(f(x0), r)) / r²`.
pub fn fundamental_ratio<M: PlanarMap + ?Sized>(
    map: &M,
    x0: P2,
    r: f64,
    per_radius: usize,
    min_side: usize,
) -> Result<f64> {
    if x0.x1.abs() + r >= 1.0 || x0.x2.abs() + r >= 1.0 {
        return Err(Error::WindowOutsideDomain(format!(
            "B(({}, {}), {r}) leaves the open square",
            x0.x1, x0.x2
        )));
    }
    let w = Window {
        x0,
        y0: map.eval(x0),
        r,
        x_shape: Shape::Ball,
        y_shape: Shape::Ball,
    };
    Ok(window_measure_patches(map, &w, per_radius, min_side).total_variation / (r * r))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseGradientCheck {
    /// `D(f^{-1})(f(U))`, row-major.
    pub lhs: [f64; 4],
    /// `adj Df(U)`, row-major.
    pub rhs: [f64; 4],
    pub residuals: [f64; 4],
    pub quadrature_error: f64,
}

impl InverseGradientCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(*r))
    }
}

/// Compares `∫_{f(U)} D(f^{-1})` with `∫_U adj Df` for a level map.
pub fn inverse_gradient_check(map: &LevelMap, u: &Rect2<f64>, tol: f64) -> InverseGradientCheck {
    let rhs_parts = [
        integrate_patches(map, u, tol, |p, x| map.patch_grad(p, x).m22),
        integrate_patches(map, u, tol, |p, x| -map.patch_grad(p, x).m12),
        integrate_patches(map, u, tol, |p, x| -map.patch_grad(p, x).m21),
        integrate_patches(map, u, tol, |p, x| map.patch_grad(p, x).m11),
    ];
    // ∫_{z : f_k(z) ∈ U} D f_k(z) dz; for R ∘ f_k the inverse is f_k ∘ R and
    // the same integral gets multiplied by R on the right.
    let (pre, pre_err) = preimage_gradient_integral(map.k, u, tol);
    let lhs = match map.orientation {
        Orientation::AsConstructed => pre,
        Orientation::Reflected => [pre[0], -pre[1], pre[2], -pre[3]],
    };
    let rhs = rhs_parts.map(|i| i.value);
    InverseGradientCheck {
        lhs,
        rhs,
        residuals: std::array::from_fn(|i| (lhs[i] - rhs[i]).abs()),
        quadrature_error: pre_err + rhs_parts.iter().map(|i| i.error).sum::<f64>(),
    }
}

/// `∫_{z : f_k(z) ∈ U} D f_k(z) dz`, row-major, with its error estimate.
///
/// On each piece one component of `f_k` depends on a single variable and the
/// other is linear in the remaining one, so every fibre of the region is an
/// interval known in closed form.
pub fn preimage_gradient_integral(k: usize, u: &Rect2<f64>, tol: f64) -> ([f64; 4], f64) {
    let patches = level_patches(k, &Rect2::unit_square());
    let parts: Vec<([f64; 4], f64)> = patches
        .par_iter()
        .map(|p| {
            let piece = p.piece.expect("level patches carry pieces");
            let img = crate::degree::bbox(&piece.partner().polygon());
            if !img.intersects(u) {
                return ([0.0; 4], 0.0);
            }
            piece_preimage(&piece, u, tol / 64.0)
        })
        .collect();
    parts.into_iter().fold(([0.0; 4], 0.0), |(a, e), (b, f)| {
        (std::array::from_fn(|i| a[i] + b[i]), e + f)
    })
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (hi > lo).then_some((lo, hi))
}

fn piece_preimage(piece: &Piece, u: &Rect2<f64>, tol: f64) -> ([f64; 4], f64) {
    let s = 2f64.powi(piece.level as i32);
    let dst = piece.dst;
    let j = piece.level;
    let (al0, al1) = (
        crate::construction::a_seq::<f64>(j) / s,
        crate::construction::a_seq::<f64>(j + 1) / s,
    );
    let (be0, be1) = (
        crate::construction::b_seq::<f64>(j) / s,
        crate::construction::b_seq::<f64>(j + 1) / s,
    );
    match piece.kind {
        PieceKind::Q => {
            let c = crate::construction::a_seq::<f64>(j + 1) / crate::construction::b_seq::<f64>(j + 1);
            // f1 = dst1 + c y2, f2 = dst2 + y1 / c
            let y2 = intersect(
                ((u.lo.x1 - dst.x1) / c, (u.hi.x1 - dst.x1) / c),
                (-be1, be1),
            );
            let y1 = intersect(((u.lo.x2 - dst.x2) * c, (u.hi.x2 - dst.x2) * c), (-al1, al1));
            match (y1, y2) {
                (Some(a), Some(b)) => {
                    let area = (a.1 - a.0) * (b.1 - b.0);
                    ([0.0, c * area, area / c, 0.0], 0.0)
                }
                _ => ([0.0; 4], 0.0),
            }
        }
        PieceKind::ATop | PieceKind::ABottom => {
            let sg = if piece.kind == PieceKind::ATop { 1.0 } else { -1.0 };
            // f1 = dst1 + sg / (2s) + y2 / 2
            let off = dst.x1 + sg / (2.0 * s);
            let range = if sg > 0.0 { (be1, be0) } else { (-be0, -be1) };
            let Some((t0, t1)) = intersect((2.0 * (u.lo.x1 - off), 2.0 * (u.hi.x1 - off)), range) else {
                return ([0.0; 4], 0.0);
            };
            let fibre = |y2: f64| -> Option<(f64, f64, f64, f64)> {
                let ax2 = sg * y2;
                let w = al1 + (ax2 - be1) * (al0 - al1) / (be0 - be1);
                let bb = s * ax2;
                let aa = 0.5 + 0.5 * s * ax2;
                let r = aa / bb;
                let (l, h) = intersect(((u.lo.x2 - dst.x2) * r, (u.hi.x2 - dst.x2) * r), (-w, w))?;
                Some((l, h, bb / aa, s * sg / aa * (1.0 - bb / (2.0 * aa))))
            };
            let ent = |which: usize| {
                integrate_1d(
                    &|y2| match fibre(y2) {
                        None => 0.0,
                        Some((l, h, ratio, coef)) => match which {
                            1 => 0.5 * (h - l),
                            2 => ratio * (h - l),
                            3 => coef * (h * h - l * l) / 2.0,
                            _ => 0.0,
                        },
                    },
                    t0,
                    t1,
                    tol,
                )
            };
            let (e1, e2, e3) = (ent(1), ent(2), ent(3));
            ([0.0, e1.value, e2.value, e3.value], e1.error + e2.error + e3.error)
        }
        PieceKind::BLeft | PieceKind::BRight => {
            let sg = if piece.kind == PieceKind::BRight { 1.0 } else { -1.0 };
            // f2 = dst2 + 2 y1 - sg / s
            let off = dst.x2 - sg / s;
            let range = if sg > 0.0 { (al1, al0) } else { (-al0, -al1) };
            let Some((t0, t1)) = intersect(((u.lo.x2 - off) / 2.0, (u.hi.x2 - off) / 2.0), range) else {
                return ([0.0; 4], 0.0);
            };
            let fibre = |y1: f64| -> Option<(f64, f64, f64, f64)> {
                let ax1 = sg * y1;
                let w = be1 + (ax1 - al1) * (be0 - be1) / (al0 - al1);
                let aa = s * ax1;
                let bb = 2.0 * s * ax1 - 1.0;
                let r = bb / aa;
                let (l, h) = intersect(((u.lo.x1 - dst.x1) * r, (u.hi.x1 - dst.x1) * r), (-w, w))?;
                Some((l, h, aa / bb, s * sg / bb * (1.0 - 2.0 * aa / bb)))
            };
            let ent = |which: usize| {
                integrate_1d(
                    &|y1| match fibre(y1) {
                        None => 0.0,
                        Some((l, h, ratio, coef)) => match which {
                            0 => coef * (h * h - l * l) / 2.0,
                            1 => ratio * (h - l),
                            2 => 2.0 * (h - l),
                            _ => 0.0,
                        },
                    },
                    t0,
                    t1,
                    tol,
                )
            };
            let (e0, e1, e2) = (ent(0), ent(1), ent(2));
            ([e0.value, e1.value, e2.value, 0.0], e0.error + e1.error + e2.error)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileScale {
    pub j: u32,
    pub r: f64,
    pub total_variation: f64,
    /// Window `μ` divided by its own `|μ|`.
    pub normalized: MuVector,
    /// Determinant of the normalized `(κ_i^j)` block.
    pub kappa_det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupProfile {
    pub x0: P2,
    pub y0: P2,
    pub scales: Vec<ProfileScale>,
}

/// Blow-up profile of `map` at `x0` on windows `B(x0, r_j) × [f(x0) ± r_j]²`
/// with `r_j = 2^{-j}`, sampled per smooth patch (see [`window_measure_patches`]).
pub fn blowup_profile<M: PlanarMap + ?Sized>(
    map: &M,
    x0: P2,
    scales: &[u32],
    per_radius: usize,
    min_side: usize,
) -> BlowupProfile {
    let y0 = map.eval(x0);
    let scales = scales
        .iter()
        .map(|&j| {
            let r = 2f64.powi(-(j as i32));
            let w = Window {
                x0,
                y0,
                r,
                x_shape: Shape::Ball,
                y_shape: Shape::Square,
            };
            let wm = window_measure_patches(map, &w, per_radius, min_side);
            let tv = wm.total_variation.max(f64::MIN_POSITIVE);
            let normalized = wm.mu.scaled(1.0 / tv);
            ProfileScale {
                j,
                r,
                total_variation: wm.total_variation,
                kappa_det: normalized.gradient_block().det(),
                normalized,
            }
        })
        .collect();
    BlowupProfile { x0, y0, scales }
}

/// Blow-up profile of `f_k` at the Cantor point with constant codes
/// `α = β = (s, s, ...)`. Requires `k ≥` the largest scale index.
pub fn cantor_blowup_profile(
    k: usize,
    sign: i8,
    scales: &[u32],
    per_radius: usize,
    min_side: usize,
) -> Result<BlowupProfile> {
    let deepest = scales.iter().copied().max().unwrap_or(0);
    if (k as u32) < deepest {
        return Err(Error::InsufficientDepth { level: k, scale: deepest });
    }
    Ok(blowup_profile(&LevelMap::new(k), cantor_point(sign), scales, per_radius, min_side))
}

/// The point of `S` coded by `α = β = (s, s, ...)`, to double precision.
pub fn cantor_point(sign: i8) -> P2 {
    let code = crate::geometry::SignCode::constant(sign, 52).expect("valid sign");
    let (u, v) = crate::construction::code_point::<f64>(&code);
    Point2::new(u, v)
}

/// A smooth scalar test function on the plane.
pub trait TestFunction: Sync {
    fn eval(&self, x: P2) -> f64;
    fn grad(&self, x: P2) -> P2;
}

impl TestFunction for Bump {
    fn eval(&self, x: P2) -> f64 {
        Bump::eval(self, x)
    }
    fn grad(&self, x: P2) -> P2 {
        Bump::grad(self, x)
    }
}

/// A constant function.
pub struct Constant(pub f64);

impl TestFunction for Constant {
    fn eval(&self, _x: P2) -> f64 {
        self.0
    }
    fn grad(&self, _x: P2) -> P2 {
        Point2::new(0.0, 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormSlot {
    Dx1,
    Dx2,
    Dy1,
    Dy2,
}

impl FormSlot {
    pub const ALL: [FormSlot; 4] = [FormSlot::Dx1, FormSlot::Dx2, FormSlot::Dy1, FormSlot::Dy2];

    /// Index of the partial derivative paired with the slot.
    fn direction(self) -> usize {
        match self {
            FormSlot::Dx2 | FormSlot::Dy2 => 0,
            FormSlot::Dx1 | FormSlot::Dy1 => 1,
        }
    }
}

/// `∫ ∂_d(outer) · inner∘map + Σ_m outer · (∂_m inner)∘map · ∂_d map_m`,
/// i.e. `∫ ∂_d (outer · inner∘map)`, over the support of `outer`.
pub fn form_residual<M, I>(map: &M, outer: &Bump, inner: &I, direction: usize, tol: f64) -> Integral
where
    M: PlanarMap + ?Sized,
    I: TestFunction,
{
    let pick = |p: P2| if direction == 0 { p.x1 } else { p.x2 };
    integrate_patches(map, &outer.support(), tol, |p, x| {
        let y = map.patch_eval(p, x);
        let g = map.patch_grad(p, x);
        let dy = inner.grad(y);
        let (d1, d2) = if direction == 0 { (g.m11, g.m21) } else { (g.m12, g.m22) };
        pick(outer.grad(x)) * inner.eval(y) + outer.eval(x) * (dy.x1 * d1 + dy.x2 * d2)
    })
}

/// Boundary of the graph current of `f_k` tested on the form slot `which`;
/// the `dy` slots use `f_k^{-1} = f_k` with the roles of `η` and `φ`
/// exchanged.
pub fn boundaryless_residual(k: usize, eta: &Bump, phi: &Bump, which: FormSlot, tol: f64) -> Integral {
    let map = LevelMap::new(k);
    match which {
        FormSlot::Dx1 | FormSlot::Dx2 => form_residual(&map, eta, phi, which.direction(), tol),
        FormSlot::Dy1 | FormSlot::Dy2 => form_residual(&map, phi, eta, which.direction(), tol),
    }
}

/// `Σ_cells |μ(Γ(cell))|` over an `n × n` partition of the square.
pub fn graph_area_proxy<M: PlanarMap + ?Sized>(map: &M, n: usize, tol: f64) -> f64 {
    let h = 2.0 / n as f64;
    (0..n * n)
        .map(|idx| {
            let (i, j) = (idx % n, idx / n);
            let cell = Rect2::from_bounds(
                -1.0 + i as f64 * h,
                -1.0 + (i + 1) as f64 * h,
                -1.0 + j as f64 * h,
                -1.0 + (j + 1) as f64 * h,
            )
            .expect("ordered bounds");
            mu_on_cell_quadrature(map, &cell, tol).norm()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::AnalyticMap;

    #[test]
    fn identity_density_norm_is_two() {
        let d = MuVector::density(&Mat2::identity());
        assert_eq!(d.components(), [1.0, 1.0, 0.0, 1.0, -1.0, 0.0]);
        assert_eq!(d.norm(), 2.0);
    }

    #[test]
    fn identity_blowup_is_flat() {
        let p = blowup_profile(&AnalyticMap::Identity, Point2::new(0.1, -0.2), &[1, 2, 3], 64, 4);
        for s in &p.scales {
            // density (1, 1, 0, 1, -1, 0) has norm 2
            assert!((s.normalized.mu12 - 0.5).abs() < 1e-12);
            assert!((s.normalized.mu_up12 - 0.5).abs() < 1e-12);
            assert!(s.normalized.max_abs() <= 1.0);
        }
    }

    #[test]
    fn cantor_profile_needs_depth() {
        assert!(matches!(
            cantor_blowup_profile(3, 1, &[1, 4], 16, 2),
            Err(Error::InsufficientDepth { level: 3, scale: 4 })
        ));
    }

    #[test]
    fn identity_fundamental_ratio() {
        let r = fundamental_ratio(&AnalyticMap::Identity, Point2::new(0.0, 0.0), 0.25, 64, 4).unwrap();
        assert!((r - 2.0 * std::f64::consts::PI).abs() < 0.05, "{r}");
        assert!(fundamental_ratio(&AnalyticMap::Identity, Point2::new(0.9, 0.0), 0.25, 8, 2).is_err());
    }

    #[test]
    fn preimage_integral_full_square() {
        // over U = Q_0 the region is the whole square
        let u = Rect2::unit_square();
        let (pre, _) = preimage_gradient_integral(2, &u, 1e-10);
        let map = LevelMap::new(2);
        let direct: Vec<f64> = (0..4)
            .map(|i| {
                integrate_patches(&map, &u, 1e-10, move |p, x| map.patch_grad(p, x).entries()[i]).value
            })
            .collect();
        for i in 0..4 {
            assert!((pre[i] - direct[i]).abs() < 1e-8, "{i}: {} vs {}", pre[i], direct[i]);
        }
    }

    #[test]
    fn preimage_integral_matches_sampling() {
        let u = Rect2::from_bounds(-0.3, 0.6, -0.8, 0.1).unwrap();
        let (pre, _) = preimage_gradient_integral(2, &u, 1e-10);
        let map = LevelMap::new(2);
        let n = 800;
        let h = 2.0 / n as f64;
        let mut acc = [0.0; 4];
        for j in 0..n {
            for i in 0..n {
                let z = Point2::new(-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h);
                if crate::geometry::rect_contains(&u, &map.eval(z), true) {
                    if let Some(g) = map.grad(z) {
                        for (a, e) in acc.iter_mut().zip(g.entries()) {
                            *a += e * h * h;
                        }
                    }
                }
            }
        }
        for i in 0..4 {
            assert!((pre[i] - acc[i]).abs() < 2e-2, "{i}: {} vs {}", pre[i], acc[i]);
        }
    }

    #[test]
    fn constant_inner_function_cancels() {
        let eta = Bump::square(Point2::new(0.1, 0.2), 0.4);
        let r = form_residual(&LevelMap::new(2), &eta, &Constant(3.0), 0, 1e-10);
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn cantor_point_is_fixed() {
        let x0 = cantor_point(1);
        assert!((x0.x1 - 5.0 / 6.0).abs() < 1e-15 && (x0.x2 - 2.0 / 3.0).abs() < 1e-15);
        for k in 1..8 {
            assert!(LevelMap::new(k).eval(x0).dist(&x0) < 2f64.powi(-(k as i32)));
        }
    }
}
