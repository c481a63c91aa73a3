//! The Cantor-type construction: level constants, the building blocks `g_k`,
//! the glued approximants `f_k`, and the sets `S_k = X_k × Y_k`.
//!
//! Everything is generic over [`Scalar`], so the same code runs in exact
//! rational mode and in `f64`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mat_apply, rect_contains, Mat2, Point2, Rect2, SignCode};
use crate::scalar::Scalar;

/// Deepest level accepted anywhere. Cells at this depth are ~2^-48 wide,
/// which is the end of the road for `f64`.
pub const MAX_LEVEL: usize = 48;

fn check_level(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroLevel);
    }
    if k > MAX_LEVEL {
        return Err(Error::LevelTooDeep {
            level: k,
            max: MAX_LEVEL,
        });
    }
    Ok(())
}

/// `a_k = (1 + 2^{1-k}) / 2`. Defined for `k ≥ 1`.
pub fn a_seq<S: Scalar>(k: usize) -> S {
    (S::one() + S::pow2(1 - k as i32)) / S::from_i64(2)
}

/// `b_k = 2^{1-k}`.
pub fn b_seq<S: Scalar>(k: usize) -> S {
    S::pow2(1 - k as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelParams<S> {
    pub k: usize,
    pub a_k: S,
    pub a_k1: S,
    pub b_k: S,
    pub b_k1: S,
    /// `P_k = [±2^{-k} a_k] × [±2^{-k} b_k]`.
    pub p: Rect2<S>,
    /// `Q_k = [±2^{-k} a_{k+1}] × [±2^{-k} b_{k+1}]`.
    pub q: Rect2<S>,
}

impl<S: Scalar> LevelParams<S> {
    /// `2^k`.
    pub fn scale(&self) -> S {
        S::pow2(self.k as i32)
    }

    pub fn delta_a(&self) -> S {
        self.a_k.clone() - self.a_k1.clone()
    }

    pub fn delta_b(&self) -> S {
        self.b_k.clone() - self.b_k1.clone()
    }

    /// `A(t) = a_k + t (a_{k+1} - a_k)`.
    pub fn a_at(&self, t: &S) -> S {
        self.a_k.clone() - t.clone() * self.delta_a()
    }

    /// `B(t) = b_k + t (b_{k+1} - b_k)`.
    pub fn b_at(&self, t: &S) -> S {
        self.b_k.clone() - t.clone() * self.delta_b()
    }
}

pub fn level_params<S: Scalar>(k: usize) -> Result<LevelParams<S>> {
    check_level(k)?;
    let a_k = a_seq::<S>(k);
    let a_k1 = a_seq::<S>(k + 1);
    let b_k = b_seq::<S>(k);
    let b_k1 = b_seq::<S>(k + 1);
    let h = S::pow2(-(k as i32));
    let origin = Point2::origin();
    let p = Rect2::centered(&origin, &(h.clone() * a_k.clone()), &(h.clone() * b_k.clone()));
    let q = Rect2::centered(&origin, &(h.clone() * a_k1.clone()), &(h * b_k1.clone()));
    Ok(LevelParams {
        k,
        a_k,
        a_k1,
        b_k,
        b_k1,
        p,
        q,
    })
}

/// `(ξ_k(x), η_k(x))`.
pub fn xi_eta<S: Scalar>(k: usize, x: &Point2<S>) -> Result<(S, S)> {
    let lp = level_params::<S>(k)?;
    if !rect_contains(&lp.p, x, true) {
        return Err(outside(x, "P_k"));
    }
    Ok(xi_eta_unchecked(&lp, x))
}

fn xi_eta_unchecked<S: Scalar>(lp: &LevelParams<S>, x: &Point2<S>) -> (S, S) {
    let s = lp.scale();
    let xi = (lp.a_k.clone() - s.clone() * x.x1.abs()) / lp.delta_a();
    let eta = (lp.b_k.clone() - s * x.x2.abs()) / lp.delta_b();
    (xi, eta)
}

fn outside<S: Scalar>(x: &Point2<S>, domain: &'static str) -> Error {
    Error::Outside {
        x1: x.x1.to_f64(),
        x2: x.x2.to_f64(),
        domain,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Q,
    A,
    B,
    SeamAB,
    /// A corner of `P_k`, where `ξ = η = 0`.
    BoundaryP,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionTag<S> {
    pub tag: Region,
    pub t: S,
}

pub fn classify<S: Scalar>(k: usize, x: &Point2<S>) -> Result<RegionTag<S>> {
    let lp = level_params::<S>(k)?;
    Ok(classify_in(&lp, x))
}

pub(crate) fn classify_in<S: Scalar>(lp: &LevelParams<S>, x: &Point2<S>) -> RegionTag<S> {
    if !rect_contains(&lp.p, x, true) {
        return RegionTag {
            tag: Region::Outside,
            t: S::zero(),
        };
    }
    let (xi, eta) = xi_eta_unchecked(lp, x);
    let one = S::one();
    if xi >= one && eta >= one {
        return RegionTag {
            tag: Region::Q,
            t: one,
        };
    }
    let clamp = |v: S| S::max_of(S::zero(), S::min_of(v, S::one()));
    let tag = if xi.is_zero() && eta.is_zero() {
        Region::BoundaryP
    } else if xi == eta {
        Region::SeamAB
    } else if xi > eta {
        Region::A
    } else {
        Region::B
    };
    let t = clamp(S::min_of(xi, eta));
    RegionTag { tag, t }
}

/// `T_k^t`, the anti-diagonal matrix with `m12 = A(t)/B(t)`, `m21 = B(t)/A(t)`.
pub fn transfer_matrix<S: Scalar>(k: usize, t: &S) -> Result<Mat2<S>> {
    if *t < S::zero() || *t > S::one() {
        return Err(Error::ParameterOutOfRange(t.to_f64()));
    }
    let lp = level_params::<S>(k)?;
    Ok(transfer_in(&lp, t))
}

fn transfer_in<S: Scalar>(lp: &LevelParams<S>, t: &S) -> Mat2<S> {
    let a = lp.a_at(t);
    let b = lp.b_at(t);
    Mat2::anti_diagonal(a.clone() / b.clone(), b / a)
}

/// `g_k(x) = T_k^{t(x)} x` on `P_k`.
pub fn g_eval<S: Scalar>(k: usize, x: &Point2<S>) -> Result<Point2<S>> {
    let lp = level_params::<S>(k)?;
    g_in(&lp, x)
}

pub(crate) fn g_in<S: Scalar>(lp: &LevelParams<S>, x: &Point2<S>) -> Result<Point2<S>> {
    let tag = classify_in(lp, x);
    if tag.tag == Region::Outside {
        return Err(outside(x, "P_k"));
    }
    Ok(mat_apply(&transfer_in(lp, &tag.t), x))
}

/// `(u_α, v_α)` with `u_α = Σ 2^{-j} α_j a_j` and `v_α = Σ 2^{-j} α_j b_j`.
pub fn code_point<S: Scalar>(alpha: &SignCode) -> (S, S) {
    let mut u = S::zero();
    let mut v = S::zero();
    for (i, &s) in alpha.signs().iter().enumerate() {
        let j = i + 1;
        let w = S::pow2(-(j as i32)) * S::from_i64(s as i64);
        u = u + w.clone() * a_seq::<S>(j);
        v = v + w * b_seq::<S>(j);
    }
    (u, v)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellAddress {
    pub alpha: SignCode,
    pub beta: SignCode,
}

impl CellAddress {
    pub fn new(alpha: SignCode, beta: SignCode) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::CodeLengthMismatch {
                alpha: alpha.len(),
                beta: beta.len(),
            });
        }
        Ok(CellAddress { alpha, beta })
    }

    pub fn level(&self) -> usize {
        self.alpha.len()
    }

    /// The cell `P_{β,α}` that `f_k` maps this one onto.
    pub fn swapped(&self) -> CellAddress {
        CellAddress {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
        }
    }

    /// All `4^k` addresses, ordered lexicographically in `(α, β)`.
    pub fn all(k: usize) -> Vec<CellAddress> {
        let codes = SignCode::all(k);
        codes
            .iter()
            .flat_map(|a| {
                codes.iter().map(move |b| CellAddress {
                    alpha: a.clone(),
                    beta: b.clone(),
                })
            })
            .collect()
    }

    /// `(u_α, v_β)`.
    pub fn center<S: Scalar>(&self) -> Point2<S> {
        let (u, _) = code_point::<S>(&self.alpha);
        let (_, v) = code_point::<S>(&self.beta);
        Point2::new(u, v)
    }
}

/// `(P_{α,β}, Q_{α,β})`.
pub fn cell_rects<S: Scalar>(addr: &CellAddress) -> Result<(Rect2<S>, Rect2<S>)> {
    let lp = level_params::<S>(addr.level())?;
    let c = addr.center::<S>();
    let shift = |r: &Rect2<S>| Rect2 {
        lo: r.lo.add(&c),
        hi: r.hi.add(&c),
    };
    Ok((shift(&lp.p), shift(&lp.q)))
}

/// Per-axis descent through the nested intervals. Returns the signs chosen
/// and the depth reached (number of levels whose interval contains `x`).
fn descend_axis<S: Scalar>(x: &S, max_depth: usize, use_a: bool) -> (Vec<i8>, usize) {
    let mut c = S::zero();
    let mut signs = Vec::with_capacity(max_depth);
    for j in 1..=max_depth {
        let w = if use_a { a_seq::<S>(j) } else { b_seq::<S>(j) };
        let h = S::pow2(-(j as i32)) * w;
        let reach = h.clone() * S::from_i64(2);
        let d = x.clone() - c.clone();
        if d.abs() > reach {
            return (signs, j - 1);
        }
        let s: i8 = if d > S::zero() { 1 } else { -1 };
        c = if s > 0 { c + h } else { c - h };
        signs.push(s);
    }
    (signs, max_depth)
}

/// Deepest `j ≤ max_depth` with `x ∈ S_j`, and the address of that cell
/// (tie rule: `-1` before `+1` at every level). `None` when `x ∉ Q_0`.
pub fn locate_deepest<S: Scalar>(x: &Point2<S>, max_depth: usize) -> Option<CellAddress> {
    let (sa, da) = descend_axis(&x.x1, max_depth, true);
    let (sb, db) = descend_axis(&x.x2, max_depth, false);
    let d = da.min(db);
    if d == 0 {
        return None;
    }
    Some(CellAddress {
        alpha: SignCode::new(sa[..d].to_vec()).ok()?,
        beta: SignCode::new(sb[..d].to_vec()).ok()?,
    })
}

/// Level-`k` address of the closed cell containing `x`, or `None` if `x ∉ S_k`.
pub fn locate<S: Scalar>(x: &Point2<S>, k: usize) -> Option<CellAddress> {
    locate_deepest(x, k).filter(|a| a.level() == k)
}

/// Number of levels `j` with `x ∈ S_j`, capped at `cap`.
pub fn s_depth<S: Scalar>(x: &Point2<S>, cap: usize) -> usize {
    locate_deepest(x, cap).map_or(0, |a| a.level())
}

fn check_domain<S: Scalar>(x: &Point2<S>) -> Result<()> {
    let one = S::one();
    let inside = |v: &S| *v >= -one.clone() && *v <= one;
    if inside(&x.x1) && inside(&x.x2) {
        Ok(())
    } else {
        Err(outside(x, "Q_0"))
    }
}

/// `f_k(x)`: on the governing cell `P_{α,β}` of level `j ≤ k`,
/// `f_k(x) = (u_β, v_α) + g_j(x - (u_α, v_β))`.
pub fn f_level_eval<S: Scalar>(k: usize, x: &Point2<S>) -> Result<Point2<S>> {
    check_level(k)?;
    check_domain(x)?;
    let addr = locate_deepest(x, k).ok_or_else(|| outside(x, "Q_0"))?;
    apply_in_cell(&addr, x)
}

/// Rounding slack for float points on a cell edge.
const EDGE_SLACK: f64 = 1e-13;

/// `x - (u_α, v_β)`. In float mode a point on the edge of `P_{α,β}` can land
/// a few ulps outside `P_j`; it is snapped back onto the edge.
pub(crate) fn local_coords<S: Scalar>(lp: &LevelParams<S>, addr: &CellAddress, x: &Point2<S>) -> Point2<S> {
    let local = x.sub(&addr.center::<S>());
    if S::EXACT {
        return local;
    }
    let snap = |v: S, hi: &S| {
        let over = v.abs().to_f64() - hi.to_f64();
        if over > 0.0 && over <= EDGE_SLACK {
            if v.signum() < 0 {
                -hi.clone()
            } else {
                hi.clone()
            }
        } else {
            v
        }
    };
    Point2::new(snap(local.x1, &lp.p.hi.x1), snap(local.x2, &lp.p.hi.x2))
}

/// Evaluates the translated building block of the cell `addr` at `x`.
pub fn apply_in_cell<S: Scalar>(addr: &CellAddress, x: &Point2<S>) -> Result<Point2<S>> {
    let lp = level_params::<S>(addr.level())?;
    let dst = addr.swapped().center::<S>();
    let local = local_coords(&lp, addr, x);
    let g = g_in(&lp, &local)?;
    Ok(g.add(&dst))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult<S> {
    pub value: Point2<S>,
    pub depth_used: usize,
    /// Bound on `|value - f(x)|`; zero when `x ∉ S_{depth+1}`.
    pub error_bound: f64,
}

/// Approximates the limit map `f` by `f_depth`.
pub fn f_limit_eval<S: Scalar>(x: &Point2<S>, depth: usize) -> Result<EvalResult<S>> {
    let value = f_level_eval(depth, x)?;
    let error_bound = if s_depth(x, depth + 1) > depth {
        let lp = level_params::<f64>(depth + 1)?;
        lp.p.diameter()
    } else {
        0.0
    };
    Ok(EvalResult {
        value,
        depth_used: depth,
        error_bound,
    })
}

/// `|S_k| = 4 a_k b_k`.
pub fn s_measure<S: Scalar>(k: usize) -> Result<S> {
    check_level(k)?;
    Ok(S::from_i64(4) * a_seq::<S>(k) * b_seq::<S>(k))
}

/// Total length of the level-`k` intervals `X_α`: `2^k · 2^{1-k} a_k = 2 a_k`.
pub fn x_measure<S: Scalar>(k: usize) -> Result<S> {
    check_level(k)?;
    Ok(S::from_i64(2) * a_seq::<S>(k))
}

/// Total length of the level-`k` intervals `Y_β`: `2 b_k`.
pub fn y_measure<S: Scalar>(k: usize) -> Result<S> {
    check_level(k)?;
    Ok(S::from_i64(2) * b_seq::<S>(k))
}

/// Level-`k` intervals `X_α` (or `Y_β` when `use_a` is false) in code order.
pub fn intervals<S: Scalar>(k: usize, use_a: bool) -> Result<Vec<(SignCode, S, S)>> {
    check_level(k)?;
    let w = if use_a { a_seq::<S>(k) } else { b_seq::<S>(k) };
    let h = S::pow2(-(k as i32)) * w;
    Ok(SignCode::all(k)
        .into_iter()
        .map(|c| {
            let (u, v) = code_point::<S>(&c);
            let m = if use_a { u } else { v };
            (c, m.clone() - h.clone(), m + h.clone())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    type E = Exact;

    fn q(p: i64, d: i64) -> E {
        E::ratio(p, d)
    }

    fn pt(a: E, b: E) -> Point2<E> {
        Point2::new(a, b)
    }

    fn code(s: &str) -> SignCode {
        SignCode::parse(s).unwrap()
    }

    #[test]
    fn level_params_examples() {
        let l1 = level_params::<E>(1).unwrap();
        assert_eq!((l1.a_k.clone(), l1.b_k.clone()), (q(1, 1), q(1, 1)));
        assert_eq!(l1.p, Rect2::from_bounds(q(-1, 2), q(1, 2), q(-1, 2), q(1, 2)).unwrap());
        let l2 = level_params::<E>(2).unwrap();
        assert_eq!((l2.a_k, l2.b_k), (q(3, 4), q(1, 2)));
        let l3 = level_params::<E>(3).unwrap();
        assert_eq!(l3.b_k, q(1, 4));
        assert_eq!(l3.b_k, q(2, 1) * l3.b_k1);
        assert_eq!(level_params::<E>(0).unwrap_err(), Error::ZeroLevel);
    }

    #[test]
    fn sequence_relations() {
        for k in 1..=20 {
            let lp = level_params::<E>(k).unwrap();
            assert_eq!(lp.b_k, q(2, 1) * lp.b_k1.clone());
            assert_eq!(lp.delta_b(), q(2, 1) * lp.delta_a());
            assert!(lp.p.contains_rect(&lp.q) && lp.p != lp.q);
        }
    }

    #[test]
    fn xi_eta_examples() {
        assert_eq!(xi_eta(1, &pt(q(1, 2), q(0, 1))).unwrap(), (q(0, 1), q(2, 1)));
        assert_eq!(xi_eta(1, &pt(q(0, 1), q(1, 2))).unwrap(), (q(4, 1), q(0, 1)));
        assert_eq!(xi_eta(1, &pt(q(3, 8), q(1, 4))).unwrap(), (q(1, 1), q(1, 1)));
        assert!(matches!(
            xi_eta(1, &pt(q(1, 1), q(0, 1))),
            Err(Error::Outside { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let c = classify(1, &pt(q(0, 1), q(0, 1))).unwrap();
        assert_eq!((c.tag, c.t), (Region::Q, q(1, 1)));
        let c = classify(1, &pt(q(1, 2), q(0, 1))).unwrap();
        assert_eq!((c.tag, c.t), (Region::B, q(0, 1)));
        let c = classify(1, &pt(q(0, 1), q(1, 2))).unwrap();
        assert_eq!((c.tag, c.t), (Region::A, q(0, 1)));
        let c = classify(1, &pt(q(1, 2), q(1, 2))).unwrap();
        assert_eq!(c.tag, Region::BoundaryP);
        let c = classify(1, &pt(q(2, 1), q(0, 1))).unwrap();
        assert_eq!(c.tag, Region::Outside);
    }

    #[test]
    fn transfer_examples() {
        let t0 = transfer_matrix::<E>(1, &q(0, 1)).unwrap();
        assert_eq!(t0, Mat2::anti_diagonal(q(1, 1), q(1, 1)));
        let t1 = transfer_matrix::<E>(1, &q(1, 1)).unwrap();
        assert_eq!(t1, Mat2::anti_diagonal(q(3, 2), q(2, 3)));
        for k in 1..6 {
            for t in [q(0, 1), q(1, 3), q(7, 8), q(1, 1)] {
                assert_eq!(transfer_matrix::<E>(k, &t).unwrap().det(), q(-1, 1));
            }
        }
        assert!(transfer_matrix::<E>(1, &q(3, 2)).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_eval(1, &pt(q(0, 1), q(0, 1))).unwrap(), pt(q(0, 1), q(0, 1)));
        assert_eq!(g_eval(1, &pt(q(1, 2), q(1, 2))).unwrap(), pt(q(1, 2), q(1, 2)));
        assert_eq!(g_eval(1, &pt(q(0, 1), q(1, 4))).unwrap(), pt(q(3, 8), q(0, 1)));
        assert!(g_eval(1, &pt(q(1, 1), q(1, 1))).is_err());
    }

    #[test]
    fn code_point_examples() {
        assert_eq!(code_point::<E>(&code("+")), (q(1, 2), q(1, 2)));
        assert_eq!(code_point::<E>(&code("+-")), (q(5, 16), q(3, 8)));
        assert_eq!(code_point::<E>(&code("-")).0, q(-1, 2));
        let a = code("+-++-");
        let (u, v) = code_point::<E>(&a);
        let (un, vn) = code_point::<E>(&a.negated());
        assert_eq!((un, vn), (-u, -v));
    }

    #[test]
    fn cell_rect_examples() {
        let addr = CellAddress::new(code("+"), code("+")).unwrap();
        let (p, _) = cell_rects::<E>(&addr).unwrap();
        assert_eq!(p, Rect2::from_bounds(q(0, 1), q(1, 1), q(0, 1), q(1, 1)).unwrap());
        let addr = CellAddress::new(code("+"), code("-")).unwrap();
        let (p, _) = cell_rects::<E>(&addr).unwrap();
        assert_eq!(p, Rect2::from_bounds(q(0, 1), q(1, 1), q(-1, 1), q(0, 1)).unwrap());
        let total = CellAddress::all(1)
            .iter()
            .map(|a| cell_rects::<E>(a).unwrap().0.area())
            .fold(q(0, 1), |s, x| s + x);
        assert_eq!(total, q(4, 1));
        assert!(CellAddress::new(code("+"), code("++")).is_err());
    }

    #[test]
    fn locate_examples() {
        let a = locate(&pt(q(1, 2), q(1, 2)), 1).unwrap();
        assert_eq!((a.alpha.to_string(), a.beta.to_string()), ("+".into(), "+".into()));
        let a = locate(&pt(q(0, 1), q(0, 1)), 1).unwrap();
        assert_eq!((a.alpha.to_string(), a.beta.to_string()), ("-".into(), "-".into()));
        assert!(locate(&Point2::new(0.99, 0.99), 2).is_none());
    }

    #[test]
    fn locate_agrees_with_brute_force() {
        let pts = [(0.99, 0.99), (0.6, 0.3), (-0.2, 0.7), (0.3, -0.74), (0.0, 0.5)];
        for &(x1, x2) in &pts {
            let x = Point2::new(x1, x2);
            let brute: Vec<_> = CellAddress::all(2)
                .into_iter()
                .filter(|a| rect_contains(&cell_rects::<f64>(a).unwrap().0, &x, true))
                .collect();
            assert_eq!(locate(&x, 2), brute.first().cloned(), "{x1},{x2}");
        }
    }

    #[test]
    fn f_level_examples() {
        assert_eq!(
            f_level_eval(1, &pt(q(1, 2), q(1, 2))).unwrap(),
            pt(q(1, 2), q(1, 2))
        );
        assert_eq!(
            f_level_eval(1, &pt(q(1, 2), q(-1, 2))).unwrap(),
            pt(q(-1, 2), q(1, 2))
        );
        assert!(f_level_eval(1, &pt(q(2, 1), q(0, 1))).is_err());
    }

    #[test]
    fn f_limit_examples() {
        let x = Point2::new(0.99, 0.99);
        let r = f_limit_eval(&x, 5).unwrap();
        assert_eq!(r.error_bound, 0.0);
        assert_eq!(r.value, f_level_eval(1, &x).unwrap());
        let c = pt(q(1, 2), q(1, 2));
        for d in 1..6 {
            let r = f_limit_eval(&c, d).unwrap();
            assert_eq!(r.value, c);
            // the level-1 centre lies in S_2 but in the gap of S_3
            assert_eq!(r.error_bound > 0.0, d == 1);
        }
    }

    #[test]
    fn measures() {
        assert_eq!(s_measure::<E>(1).unwrap(), q(4, 1));
        assert_eq!(s_measure::<E>(2).unwrap(), q(3, 2));
        assert_eq!(s_measure::<E>(4).unwrap(), q(9, 32));
        for k in 1..=12 {
            assert!(s_measure::<E>(k).unwrap() <= E::pow2(3 - k as i32));
            let xs = intervals::<E>(k, true).unwrap();
            let total = xs.iter().fold(q(0, 1), |s, (_, lo, hi)| s + hi.clone() - lo.clone());
            assert_eq!(total, x_measure::<E>(k).unwrap());
            let ys = intervals::<E>(k, false).unwrap();
            let total = ys.iter().fold(q(0, 1), |s, (_, lo, hi)| s + hi.clone() - lo.clone());
            assert_eq!(total, y_measure::<E>(k).unwrap());
        }
    }
}
