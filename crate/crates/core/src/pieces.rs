//! Decomposition of `f_k` into smooth pieces.
//!
//! Inside each cell `P_{α,β}` of level `j` the building block is smooth on
//! four trapezoids (the top/bottom pair forms `A_j`, the left/right pair
//! forms `B_j`); at the last level it is linear on `Q_{α,β}`. On every piece
//! the map and its gradient have closed forms, evaluated here in `f64`.

use serde::{Deserialize, Serialize};

use crate::construction::{a_seq, b_seq};
use crate::geometry::{Mat2, Point2, Rect2, P2};
use crate::quadrature::{clip_to_rect, polygon_area};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PieceKind {
    ATop,
    ABottom,
    BLeft,
    BRight,
    Q,
}

impl PieceKind {
    pub const SHELL: [PieceKind; 4] = [
        PieceKind::ATop,
        PieceKind::ABottom,
        PieceKind::BLeft,
        PieceKind::BRight,
    ];

    pub fn is_a(self) -> bool {
        matches!(self, PieceKind::ATop | PieceKind::ABottom)
    }

    pub fn is_b(self) -> bool {
        matches!(self, PieceKind::BLeft | PieceKind::BRight)
    }

    /// The piece that `g_k` maps this one onto.
    pub fn partner(self) -> PieceKind {
        match self {
            PieceKind::ATop => PieceKind::BRight,
            PieceKind::BRight => PieceKind::ATop,
            PieceKind::ABottom => PieceKind::BLeft,
            PieceKind::BLeft => PieceKind::ABottom,
            PieceKind::Q => PieceKind::Q,
        }
    }

    fn sign(self) -> f64 {
        match self {
            PieceKind::ATop | PieceKind::BRight => 1.0,
            PieceKind::ABottom | PieceKind::BLeft => -1.0,
            PieceKind::Q => 1.0,
        }
    }
}

/// One smooth piece of `f_k`: the building block of level `level`, moved
/// from the cell centred at `src = (u_α, v_β)` to `dst = (u_β, v_α)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub level: usize,
    pub kind: PieceKind,
    pub src: P2,
    pub dst: P2,
}

impl Piece {
    /// The building block itself, centred at the origin.
    pub fn local(level: usize, kind: PieceKind) -> Piece {
        Piece {
            level,
            kind,
            src: Point2::new(0.0, 0.0),
            dst: Point2::new(0.0, 0.0),
        }
    }

    /// Image piece under `f_k`.
    pub fn partner(&self) -> Piece {
        Piece {
            level: self.level,
            kind: self.kind.partner(),
            src: self.dst,
            dst: self.src,
        }
    }

    fn scale(&self) -> f64 {
        2f64.powi(self.level as i32)
    }

    /// Vertices in local coordinates, counter-clockwise.
    pub fn local_polygon(&self) -> [P2; 4] {
        let h = 1.0 / self.scale();
        let j = self.level;
        let (a0, a1) = (h * a_seq::<f64>(j), h * a_seq::<f64>(j + 1));
        let (b0, b1) = (h * b_seq::<f64>(j), h * b_seq::<f64>(j + 1));
        let p = Point2::new;
        match self.kind {
            PieceKind::ATop => [p(-a1, b1), p(a1, b1), p(a0, b0), p(-a0, b0)],
            PieceKind::ABottom => [p(-a0, -b0), p(a0, -b0), p(a1, -b1), p(-a1, -b1)],
            PieceKind::BRight => [p(a1, -b1), p(a0, -b0), p(a0, b0), p(a1, b1)],
            PieceKind::BLeft => [p(-a0, -b0), p(-a1, -b1), p(-a1, b1), p(-a0, b0)],
            PieceKind::Q => [p(-a1, -b1), p(a1, -b1), p(a1, b1), p(-a1, b1)],
        }
    }

    pub fn polygon(&self) -> [P2; 4] {
        self.local_polygon().map(|v| v.add(&self.src))
    }

    /// Evaluates the piece formula at `x` (global coordinates).
    pub fn eval(&self, x: P2) -> P2 {
        let y = x.sub(&self.src);
        let s = self.scale();
        let sg = self.kind.sign();
        let g = match self.kind {
            PieceKind::ATop | PieceKind::ABottom => {
                let ax2 = sg * y.x2;
                let bb = s * ax2;
                let aa = 0.5 + 0.5 * s * ax2;
                Point2::new(sg / (2.0 * s) + y.x2 / 2.0, bb / aa * y.x1)
            }
            PieceKind::BLeft | PieceKind::BRight => {
                let ax1 = sg * y.x1;
                let aa = s * ax1;
                let bb = 2.0 * s * ax1 - 1.0;
                Point2::new(aa / bb * y.x2, 2.0 * y.x1 - sg / s)
            }
            PieceKind::Q => {
                let c = self.q_ratio();
                Point2::new(c * y.x2, y.x1 / c)
            }
        };
        g.add(&self.dst)
    }

    /// `a_{k+1} / b_{k+1}`, the large entry of `T_k^1`.
    fn q_ratio(&self) -> f64 {
        a_seq::<f64>(self.level + 1) / b_seq::<f64>(self.level + 1)
    }

    /// Gradient of the piece formula at `x`.
    pub fn grad(&self, x: P2) -> Mat2<f64> {
        let y = x.sub(&self.src);
        let s = self.scale();
        let sg = self.kind.sign();
        match self.kind {
            PieceKind::ATop | PieceKind::ABottom => {
                let ax2 = sg * y.x2;
                let bb = s * ax2;
                let aa = 0.5 + 0.5 * s * ax2;
                let d22 = s * sg * y.x1 / aa * (1.0 - bb / (2.0 * aa));
                Mat2::new(0.0, 0.5, bb / aa, d22)
            }
            PieceKind::BLeft | PieceKind::BRight => {
                let ax1 = sg * y.x1;
                let aa = s * ax1;
                let bb = 2.0 * s * ax1 - 1.0;
                let d11 = s * sg * y.x2 / bb * (1.0 - 2.0 * aa / bb);
                Mat2::new(d11, aa / bb, 2.0, 0.0)
            }
            PieceKind::Q => {
                let c = self.q_ratio();
                Mat2::anti_diagonal(c, 1.0 / c)
            }
        }
    }

    /// Jacobian determinant: `-B/(2A)` on A pieces, `-2A/B` on B pieces,
    /// `-1` on Q pieces.
    pub fn jacobian(&self, x: P2) -> f64 {
        self.grad(x).det()
    }
}

/// A convex region on which a map is smooth, with the piece formula that
/// governs it (when the map is piecewise).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub poly: Vec<P2>,
    pub piece: Option<Piece>,
}

impl Patch {
    pub fn area(&self) -> f64 {
        polygon_area(&self.poly)
    }
}

/// Smooth pieces of `f_k` clipped to `domain`, in code-tree order.
pub fn level_patches(k: usize, domain: &Rect2<f64>) -> Vec<Patch> {
    let mut out = Vec::new();
    let origin = Point2::new(0.0, 0.0);
    descend(0, k, origin, origin, domain, &mut out);
    out
}

fn descend(j: usize, k: usize, src: P2, dst: P2, domain: &Rect2<f64>, out: &mut Vec<Patch>) {
    let n = j + 1;
    let h = 2f64.powi(-(n as i32));
    let (ha, hb) = (h * a_seq::<f64>(n), h * b_seq::<f64>(n));
    for sa in [-1.0, 1.0] {
        for sb in [-1.0, 1.0] {
            let csrc = Point2::new(src.x1 + sa * ha, src.x2 + sb * hb);
            let cdst = Point2::new(dst.x1 + sb * ha, dst.x2 + sa * hb);
            let cell = Rect2::centered(&csrc, &ha, &hb);
            if !cell.intersects(domain) {
                continue;
            }
            let mut emit = |kind| {
                let piece = Piece {
                    level: n,
                    kind,
                    src: csrc,
                    dst: cdst,
                };
                let poly = clip_to_rect(&piece.polygon(), domain);
                if poly.len() >= 3 && polygon_area(&poly) > 0.0 {
                    out.push(Patch {
                        poly,
                        piece: Some(piece),
                    });
                }
            };
            for kind in PieceKind::SHELL {
                emit(kind);
            }
            if n == k {
                emit(PieceKind::Q);
            } else {
                descend(n, k, csrc, cdst, domain, out);
            }
        }
    }
}
