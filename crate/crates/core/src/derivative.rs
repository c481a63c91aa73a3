//! Piecewise gradients of `g_k` and `f_k`, and total-variation integrals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{
    a_seq, b_seq, classify_in, intervals, level_params, locate_deepest, LevelParams, Region,
    RegionTag,
};
use crate::error::{Error, Result};
use crate::geometry::{Mat2, Point2, Rect2, SignCode, P2};
use crate::pieces::{level_patches, Piece, PieceKind};
use crate::quadrature::{integrate_polygon, par_sum, Integral};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradSample<S> {
    pub point: Point2<S>,
    pub tag: RegionTag<S>,
    pub grad: Mat2<S>,
    pub jac: S,
}

fn seam<S: Scalar>(x: &Point2<S>) -> Error {
    Error::Seam {
        x1: x.x1.to_f64(),
        x2: x.x2.to_f64(),
    }
}

/// `D g_k(x)` from the closed-form branch derivatives.
///
/// On `A`: `B = 2^k|x2|`, `A = 1/2 + 2^{k-1}|x2|`, and
/// `Dg = [[0, 1/2], [B/A, 2^k s2 x1 / A (1 - B/(2A))]]`.
/// On `B`: `A = 2^k|x1|`, `B = 2^{k+1}|x1| - 1`, and
/// `Dg = [[2^k s1 x2 / B (1 - 2A/B), A/B], [2, 0]]`.
/// On `Q`: `T_k^1`.
pub fn g_grad<S: Scalar>(k: usize, x: &Point2<S>) -> Result<GradSample<S>> {
    let lp = level_params::<S>(k)?;
    g_grad_in(&lp, x)
}

fn g_grad_in<S: Scalar>(lp: &LevelParams<S>, x: &Point2<S>) -> Result<GradSample<S>> {
    let tag = classify_in(lp, x);
    let s = lp.scale();
    let half = S::ratio(1, 2);
    let two = S::from_i64(2);
    let grad = match tag.tag {
        Region::Outside => {
            return Err(Error::Outside {
                x1: x.x1.to_f64(),
                x2: x.x2.to_f64(),
                domain: "P_k",
            })
        }
        Region::SeamAB | Region::BoundaryP => return Err(seam(x)),
        _ if tag.tag != Region::Q && tag.t.is_zero() => return Err(seam(x)),
        Region::Q => {
            let q = &lp.q;
            let on_edge = x.x1 == q.lo.x1 || x.x1 == q.hi.x1 || x.x2 == q.lo.x2 || x.x2 == q.hi.x2;
            if on_edge {
                return Err(seam(x));
            }
            let c = lp.a_k1.clone() / lp.b_k1.clone();
            Mat2::anti_diagonal(c.clone(), S::one() / c)
        }
        Region::A => {
            let s2 = S::from_i64(x.x2.signum() as i64);
            let ax2 = x.x2.abs();
            let bb = s.clone() * ax2.clone();
            let aa = half.clone() + half.clone() * s.clone() * ax2;
            let d22 = s * s2 * x.x1.clone() / aa.clone()
                * (S::one() - bb.clone() / (two * aa.clone()));
            Mat2::new(S::zero(), half, bb / aa, d22)
        }
        Region::B => {
            let s1 = S::from_i64(x.x1.signum() as i64);
            let ax1 = x.x1.abs();
            let aa = s.clone() * ax1.clone();
            let bb = two.clone() * s.clone() * ax1 - S::one();
            let d11 = s * s1 * x.x2.clone() / bb.clone()
                * (S::one() - two.clone() * aa.clone() / bb.clone());
            Mat2::new(d11, aa / bb, two, S::zero())
        }
    };
    let jac = grad.det();
    Ok(GradSample {
        point: x.clone(),
        tag,
        grad,
        jac,
    })
}

/// `D f_k(x)`: the gradient of the translated building block governing `x`.
pub fn f_grad<S: Scalar>(k: usize, x: &Point2<S>) -> Result<GradSample<S>> {
    let addr = locate_deepest(x, k).ok_or_else(|| Error::Outside {
        x1: x.x1.to_f64(),
        x2: x.x2.to_f64(),
        domain: "Q_0",
    })?;
    let lp = level_params::<S>(addr.level())?;
    let local = crate::construction::local_coords(&lp, &addr, x);
    let mut sample = g_grad_in(&lp, &local)?;
    sample.point = x.clone();
    Ok(sample)
}

/// The smooth piece of `f_k` containing `x` (seam points resolve to one of
/// the adjacent pieces).
pub fn piece_at(k: usize, x: &P2) -> Option<Piece> {
    let addr = locate_deepest(x, k)?;
    let j = addr.level();
    let lp = level_params::<f64>(j).ok()?;
    let src = addr.center::<f64>();
    let dst = addr.swapped().center::<f64>();
    let local = crate::construction::local_coords(&lp, &addr, x);
    let tag = classify_in(&lp, &local);
    let kind = match tag.tag {
        Region::Q => PieceKind::Q,
        Region::Outside => return None,
        Region::A => {
            if local.x2 > 0.0 {
                PieceKind::ATop
            } else {
                PieceKind::ABottom
            }
        }
        _ => {
            if local.x1 > 0.0 {
                PieceKind::BRight
            } else {
                PieceKind::BLeft
            }
        }
    };
    Some(Piece {
        level: j,
        kind,
        src,
        dst,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatNorm {
    MaxEntry,
    Operator,
    Frobenius,
    /// Largest Euclidean norm of a row; the convention for the bounds.
    MaxRow,
}

impl MatNorm {
    pub fn apply(self, m: &Mat2<f64>) -> f64 {
        match self {
            MatNorm::MaxEntry => m.max_entry(),
            MatNorm::Operator => m.operator_norm(),
            MatNorm::Frobenius => m.frobenius(),
            MatNorm::MaxRow => m.max_row_norm(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TvRegion {
    A,
    B,
    Q,
}

impl TvRegion {
    fn kinds(self) -> &'static [PieceKind] {
        match self {
            TvRegion::A => &[PieceKind::ATop, PieceKind::ABottom],
            TvRegion::B => &[PieceKind::BLeft, PieceKind::BRight],
            TvRegion::Q => &[PieceKind::Q],
        }
    }
}

/// `∫_{region} |D g_k| dx` by adaptive quadrature over the exact region
/// polygons.
pub fn tv_region(k: usize, region: TvRegion, norm: MatNorm, tol: f64) -> Result<Integral> {
    level_params::<f64>(k)?;
    Ok(region
        .kinds()
        .iter()
        .map(|&kind| {
            let piece = Piece::local(k, kind);
            let f = |x: P2| norm.apply(&piece.grad(x));
            integrate_polygon(&f, &piece.polygon(), tol / 2.0)
        })
        .sum())
}

/// `|region|` by quadrature of the constant 1.
pub fn region_area(k: usize, region: TvRegion, tol: f64) -> Result<Integral> {
    level_params::<f64>(k)?;
    Ok(region
        .kinds()
        .iter()
        .map(|&kind| integrate_polygon(&|_| 1.0, &Piece::local(k, kind).polygon(), tol))
        .sum())
}

/// `∫_{Q_k} |D g_k|` in exact arithmetic: `|Q_k|` times the row norm of `T_k^1`.
pub fn tv_q_exact<S: Scalar>(k: usize) -> Result<S> {
    let lp = level_params::<S>(k)?;
    let c = lp.a_k1.clone() / lp.b_k1.clone();
    let t1 = Mat2::anti_diagonal(c.clone(), S::one() / c);
    Ok(lp.q.area() * t1.max_row_norm())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellTerm {
    pub j: usize,
    /// `4^j ∫_{P_j \ Q_j} |D g_j|`.
    pub value: f64,
    pub error: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TVReport {
    pub k: usize,
    pub tv_a: Integral,
    pub tv_b: Integral,
    pub tv_q: Integral,
    pub bound_a: f64,
    pub bound_b: f64,
    pub bound_q: f64,
    pub shells: Vec<ShellTerm>,
    /// `4^k ∫_{Q_k} |D g_k|`, the `S_{k+1}` term.
    pub q_term: f64,
    pub q_term_bound: f64,
    /// Sum of the shell terms and the `Q` term.
    pub assembled: f64,
    /// `∫_{Q_0} |D f_k|` computed directly over all pieces of `f_k`.
    pub tv_total_fk: Integral,
    pub total_bound: f64,
    pub quadrature_error: f64,
    pub pass_regions: bool,
    pub pass_shells: bool,
    pub pass_total: bool,
}

impl TVReport {
    pub fn pass(&self) -> bool {
        self.pass_regions && self.pass_shells && self.pass_total
    }
}

/// Assembles the total-variation report for `f_k`. `slack` is added to
/// every bound before comparing.
pub fn tv_total(k: usize, tol: f64, slack: f64) -> Result<TVReport> {
    let norm = MatNorm::MaxRow;
    let tv_a = tv_region(k, TvRegion::A, norm, tol)?;
    let tv_b = tv_region(k, TvRegion::B, norm, tol)?;
    let tv_q = tv_region(k, TvRegion::Q, norm, tol)?;
    let region_bound = 2f64.powi(4 - 3 * k as i32);
    let bound_q = tv_q_exact::<f64>(k)?;

    let shells = (1..=k)
        .map(|j| {
            let a = tv_region(j, TvRegion::A, norm, tol)?;
            let b = tv_region(j, TvRegion::B, norm, tol)?;
            let w = 4f64.powi(j as i32);
            Ok(ShellTerm {
                j,
                value: w * (a.value + b.value),
                error: w * (a.error + b.error),
                bound: 2f64.powi(4 - j as i32),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let q_term = 4f64.powi(k as i32) * tv_q.value;
    let assembled = shells.iter().map(|s| s.value).sum::<f64>() + q_term;

    let patches = level_patches(k, &Rect2::unit_square());
    let n = patches.len() as f64;
    let tv_total_fk = par_sum(&patches, |p| {
        let piece = p.piece.expect("level patches carry pieces");
        let f = |x: P2| norm.apply(&piece.grad(x));
        integrate_polygon(&f, &p.poly, tol / n)
    });

    let quadrature_error = tv_total_fk.error
        + shells.iter().map(|s| s.error).sum::<f64>()
        + tv_a.error
        + tv_b.error
        + tv_q.error;
    let total_bound = 20.0;
    let pass_regions = tv_a.value <= region_bound + slack + tv_a.error
        && tv_b.value <= region_bound + slack + tv_b.error
        && (tv_q.value - bound_q).abs() <= slack + tv_q.error;
    let pass_shells =
        shells.iter().all(|s| s.value <= s.bound + slack + s.error) && q_term <= 4.0 + slack;
    let pass_total = tv_total_fk.value <= total_bound + slack + tv_total_fk.error;
    Ok(TVReport {
        k,
        tv_a,
        tv_b,
        tv_q,
        bound_a: region_bound,
        bound_b: region_bound,
        bound_q,
        shells,
        q_term,
        q_term_bound: 4.0,
        assembled,
        tv_total_fk,
        total_bound,
        quadrature_error,
        pass_regions,
        pass_shells,
        pass_total,
    })
}

/// Variation of `x2 ↦ f_{k,1}(z1, x2)` over `∪_β Y_β`, and `L = Σ_β |Y_β|`.
/// `z1 = u_α` for the level-`k` code `alpha`.
pub fn vertical_variation(k: usize, alpha: &SignCode, samples: usize) -> Result<(f64, f64)> {
    if alpha.len() != k {
        return Err(Error::CodeLengthMismatch {
            alpha: alpha.len(),
            beta: k,
        });
    }
    let (z1, _) = crate::construction::code_point::<f64>(alpha);
    vertical_variation_at(k, z1, samples)
}

/// As [`vertical_variation`] for an explicit abscissa, which must lie in a
/// level-`k` interval `X_α`.
pub fn vertical_variation_at(k: usize, z1: f64, samples: usize) -> Result<(f64, f64)> {
    let in_nest = intervals::<f64>(k, true)?
        .iter()
        .any(|(_, lo, hi)| *lo <= z1 && z1 <= *hi);
    if !in_nest {
        return Err(Error::Outside {
            x1: z1,
            x2: 0.0,
            domain: "X_k",
        });
    }
    let ys = intervals::<f64>(k, false)?;
    let n = samples.max(2);
    let per: Vec<f64> = ys
        .par_iter()
        .map(|(_, lo, hi)| {
            let f1 = |i: usize| {
                let x2 = lo + (hi - lo) * i as f64 / n as f64;
                crate::construction::f_level_eval(k, &Point2::new(z1, x2)).map(|p| p.x1)
            };
            let mut prev = f1(0)?;
            let mut v = 0.0;
            for i in 1..=n {
                let cur = f1(i)?;
                v += (cur - prev).abs();
                prev = cur;
            }
            Ok(v)
        })
        .collect::<Result<Vec<f64>>>()?;
    let big_v = per.iter().sum();
    let l = ys.iter().map(|(_, lo, hi)| hi - lo).sum();
    Ok((big_v, l))
}

/// Exact `|A_k| = 2^{1-2k} (a_k + a_{k+1}) (b_k - b_{k+1})`.
pub fn area_a_exact<S: Scalar>(k: usize) -> S {
    S::pow2(1 - 2 * k as i32)
        * (a_seq::<S>(k) + a_seq::<S>(k + 1))
        * (b_seq::<S>(k) - b_seq::<S>(k + 1))
}

/// Exact `|B_k| = 2^{1-2k} (b_k + b_{k+1}) (a_k - a_{k+1})`.
pub fn area_b_exact<S: Scalar>(k: usize) -> S {
    S::pow2(1 - 2 * k as i32)
        * (b_seq::<S>(k) + b_seq::<S>(k + 1))
        * (a_seq::<S>(k) - a_seq::<S>(k + 1))
}
