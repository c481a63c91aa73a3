//! Planar maps with a.e. gradients and a decomposition into smooth patches.

use serde::{Deserialize, Serialize};

use crate::construction::f_level_eval;
use crate::derivative::f_grad;
use crate::geometry::{Mat2, Point2, Rect2, P2};
use crate::pieces::{level_patches, Patch};
use crate::quadrature::{integrate_polygon, par_sum, Integral};

pub trait PlanarMap: Sync + Send {
    fn name(&self) -> String;

    fn eval(&self, x: P2) -> P2;

    /// Pointwise gradient, `None` where it is undefined.
    fn grad(&self, x: P2) -> Option<Mat2<f64>>;

    fn jacobian(&self, x: P2) -> Option<f64> {
        self.grad(x).map(|g| g.det())
    }

    fn inverse(&self, _y: P2) -> Option<P2> {
        None
    }

    /// Convex patches covering `domain` on which the map is smooth.
    fn patches(&self, domain: &Rect2<f64>) -> Vec<Patch> {
        vec![Patch {
            poly: domain.polygon(),
            piece: None,
        }]
    }

    /// Map evaluated with the formula of `patch` (continuous up to its edges).
    fn patch_eval(&self, _patch: &Patch, x: P2) -> P2 {
        self.eval(x)
    }

    /// Gradient evaluated with the formula of `patch`.
    fn patch_grad(&self, _patch: &Patch, x: P2) -> Mat2<f64> {
        self.grad(x).expect("smooth map has a gradient everywhere")
    }
}

/// `∫_domain h(patch, x) dx`, summed over smooth patches in order.
pub fn integrate_patches<M, H>(map: &M, domain: &Rect2<f64>, tol: f64, h: H) -> Integral
where
    M: PlanarMap + ?Sized,
    H: Fn(&Patch, P2) -> f64 + Sync + Send,
{
    let patches = map.patches(domain);
    let total = domain.area().max(f64::MIN_POSITIVE);
    par_sum(&patches, |p| {
        let share = (p.area() / total).max(1e-6);
        integrate_polygon(&|x| h(p, x), &p.poly, tol * share)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnalyticMap {
    Identity,
    /// `(x1³, x2)`.
    Cube,
    /// `z ↦ z²`.
    ComplexSquare,
    /// `(x1, -x2)`.
    Conjugation,
    /// `(2 x1, x2)`.
    Stretch,
}

impl PlanarMap for AnalyticMap {
    fn name(&self) -> String {
        match self {
            AnalyticMap::Identity => "identity",
            AnalyticMap::Cube => "cube",
            AnalyticMap::ComplexSquare => "complex-square",
            AnalyticMap::Conjugation => "conjugation",
            AnalyticMap::Stretch => "stretch",
        }
        .to_string()
    }

    fn eval(&self, x: P2) -> P2 {
        match self {
            AnalyticMap::Identity => x,
            AnalyticMap::Cube => Point2::new(x.x1.powi(3), x.x2),
            AnalyticMap::ComplexSquare => {
                Point2::new(x.x1 * x.x1 - x.x2 * x.x2, 2.0 * x.x1 * x.x2)
            }
            AnalyticMap::Conjugation => Point2::new(x.x1, -x.x2),
            AnalyticMap::Stretch => Point2::new(2.0 * x.x1, x.x2),
        }
    }

    fn grad(&self, x: P2) -> Option<Mat2<f64>> {
        Some(match self {
            AnalyticMap::Identity => Mat2::identity(),
            AnalyticMap::Cube => Mat2::new(3.0 * x.x1 * x.x1, 0.0, 0.0, 1.0),
            AnalyticMap::ComplexSquare => {
                Mat2::new(2.0 * x.x1, -2.0 * x.x2, 2.0 * x.x2, 2.0 * x.x1)
            }
            AnalyticMap::Conjugation => Mat2::new(1.0, 0.0, 0.0, -1.0),
            AnalyticMap::Stretch => Mat2::new(2.0, 0.0, 0.0, 1.0),
        })
    }

    fn inverse(&self, y: P2) -> Option<P2> {
        match self {
            AnalyticMap::Identity => Some(y),
            AnalyticMap::Cube => Some(Point2::new(y.x1.cbrt(), y.x2)),
            AnalyticMap::ComplexSquare => None,
            AnalyticMap::Conjugation => Some(Point2::new(y.x1, -y.x2)),
            AnalyticMap::Stretch => Some(Point2::new(y.x1 / 2.0, y.x2)),
        }
    }
}

/// Whether a level map is used as built or composed with `(y1, y2) ↦ (y1, -y2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    AsConstructed,
    Reflected,
}

/// `f_k`, or `R ∘ f_k` with `R(y1, y2) = (y1, -y2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMap {
    pub k: usize,
    pub orientation: Orientation,
}

impl LevelMap {
    pub fn new(k: usize) -> Self {
        LevelMap {
            k,
            orientation: Orientation::AsConstructed,
        }
    }

    pub fn reflected(k: usize) -> Self {
        LevelMap {
            k,
            orientation: Orientation::Reflected,
        }
    }

    fn post(&self, y: P2) -> P2 {
        match self.orientation {
            Orientation::AsConstructed => y,
            Orientation::Reflected => Point2::new(y.x1, -y.x2),
        }
    }

    fn post_grad(&self, g: Mat2<f64>) -> Mat2<f64> {
        match self.orientation {
            Orientation::AsConstructed => g,
            Orientation::Reflected => Mat2::new(g.m11, g.m12, -g.m21, -g.m22),
        }
    }

    /// Clamp to the closed square to absorb rounding at its edges.
    fn clamp(x: P2) -> P2 {
        Point2::new(x.x1.clamp(-1.0, 1.0), x.x2.clamp(-1.0, 1.0))
    }
}

impl PlanarMap for LevelMap {
    fn name(&self) -> String {
        match self.orientation {
            Orientation::AsConstructed => format!("f_{}", self.k),
            Orientation::Reflected => format!("R∘f_{}", self.k),
        }
    }

    fn eval(&self, x: P2) -> P2 {
        let y = f_level_eval(self.k, &Self::clamp(x)).expect("point of the closed square");
        self.post(y)
    }

    fn grad(&self, x: P2) -> Option<Mat2<f64>> {
        f_grad(self.k, &x).ok().map(|s| self.post_grad(s.grad))
    }

    /// `f_k` is an involution, so `f_k^{-1} = f_k` and `(R ∘ f_k)^{-1} = f_k ∘ R`.
    /// `None` off the closed square.
    fn inverse(&self, y: P2) -> Option<P2> {
        let z = self.post(y);
        if z.x1.abs() > 1.0 || z.x2.abs() > 1.0 {
            return None;
        }
        f_level_eval(self.k, &z).ok()
    }

    fn patches(&self, domain: &Rect2<f64>) -> Vec<Patch> {
        let clipped = domain.intersection(&Rect2::unit_square());
        clipped.map_or_else(Vec::new, |d| level_patches(self.k, &d))
    }

    fn patch_eval(&self, patch: &Patch, x: P2) -> P2 {
        match &patch.piece {
            Some(p) => self.post(p.eval(x)),
            None => self.eval(x),
        }
    }

    fn patch_grad(&self, patch: &Patch, x: P2) -> Mat2<f64> {
        match &patch.piece {
            Some(p) => self.post_grad(p.grad(x)),
            None => self.grad(x).expect("interior point"),
        }
    }
}

/// `x ↦ (f1(x), x2)` for a given map `f`.
pub struct AuxMap<'a, M: PlanarMap + ?Sized>(pub &'a M);

impl<M: PlanarMap + ?Sized> PlanarMap for AuxMap<'_, M> {
    fn name(&self) -> String {
        format!("aux({})", self.0.name())
    }

    fn eval(&self, x: P2) -> P2 {
        Point2::new(self.0.eval(x).x1, x.x2)
    }

    fn grad(&self, x: P2) -> Option<Mat2<f64>> {
        self.0.grad(x).map(|g| Mat2::new(g.m11, g.m12, 0.0, 1.0))
    }

    fn patches(&self, domain: &Rect2<f64>) -> Vec<Patch> {
        self.0.patches(domain)
    }

    fn patch_eval(&self, patch: &Patch, x: P2) -> P2 {
        Point2::new(self.0.patch_eval(patch, x).x1, x.x2)
    }

    fn patch_grad(&self, patch: &Patch, x: P2) -> Mat2<f64> {
        let g = self.0.patch_grad(patch, x);
        Mat2::new(g.m11, g.m12, 0.0, 1.0)
    }
}

/// `y ↦ (y1, (f^{-1})_2(y))` for a map with a known inverse.
pub struct InverseAuxMap<'a, M: PlanarMap + ?Sized>(pub &'a M);

impl<M: PlanarMap + ?Sized> PlanarMap for InverseAuxMap<'_, M> {
    fn name(&self) -> String {
        format!("inverse-aux({})", self.0.name())
    }

    fn eval(&self, y: P2) -> P2 {
        let x = self.0.inverse(y).expect("map has an inverse");
        Point2::new(y.x1, x.x2)
    }

    fn grad(&self, _y: P2) -> Option<Mat2<f64>> {
        None
    }
}
