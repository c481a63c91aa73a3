//! Planar points, 2×2 matrices, axis-aligned rectangles and sign codes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2<S> {
    pub x1: S,
    pub x2: S,
}

pub type P2 = Point2<f64>;

impl<S: Scalar> Point2<S> {
    pub fn new(x1: S, x2: S) -> Self {
        Point2 { x1, x2 }
    }

    pub fn origin() -> Self {
        Point2::new(S::zero(), S::zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        Point2::new(
            self.x1.clone() + other.x1.clone(),
            self.x2.clone() + other.x2.clone(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Point2::new(
            self.x1.clone() - other.x1.clone(),
            self.x2.clone() - other.x2.clone(),
        )
    }

    pub fn scale(&self, s: &S) -> Self {
        Point2::new(self.x1.clone() * s.clone(), self.x2.clone() * s.clone())
    }

    /// Sup-norm distance.
    pub fn dist_inf(&self, other: &Self) -> S {
        let d1 = (self.x1.clone() - other.x1.clone()).abs();
        let d2 = (self.x2.clone() - other.x2.clone()).abs();
        S::max_of(d1, d2)
    }

    pub fn to_f64(&self) -> P2 {
        Point2::new(self.x1.to_f64(), self.x2.to_f64())
    }

    pub fn from_f64(p: &P2) -> Self {
        Point2::new(S::from_f64(p.x1), S::from_f64(p.x2))
    }
}

impl Copy for Point2<f64> {}

impl P2 {
    pub fn norm(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn dot(&self, other: &P2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    pub fn cross(&self, other: &P2) -> f64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn dist(&self, other: &P2) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }

    pub fn lerp(&self, other: &P2, s: f64) -> P2 {
        Point2::new(
            self.x1 + s * (other.x1 - self.x1),
            self.x2 + s * (other.x2 - self.x2),
        )
    }
}

/// Row-major 2×2 matrix `[[m11, m12], [m21, m22]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2<S> {
    pub m11: S,
    pub m12: S,
    pub m21: S,
    pub m22: S,
}

impl Copy for Mat2<f64> {}

impl<S: Scalar> Mat2<S> {
    pub fn new(m11: S, m12: S, m21: S, m22: S) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Mat2::new(S::one(), S::zero(), S::zero(), S::one())
    }

    pub fn anti_diagonal(m12: S, m21: S) -> Self {
        Mat2::new(S::zero(), m12, m21, S::zero())
    }

    pub fn det(&self) -> S {
        self.m11.clone() * self.m22.clone() - self.m12.clone() * self.m21.clone()
    }

    /// Transposed cofactor matrix.
    pub fn adjugate(&self) -> Self {
        Mat2::new(
            self.m22.clone(),
            -self.m12.clone(),
            -self.m21.clone(),
            self.m11.clone(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = |a: &S, b: &S, c: &S, d: &S| a.clone() * b.clone() + c.clone() * d.clone();
        Mat2::new(
            c(&self.m11, &o.m11, &self.m12, &o.m21),
            c(&self.m11, &o.m12, &self.m12, &o.m22),
            c(&self.m21, &o.m11, &self.m22, &o.m21),
            c(&self.m21, &o.m12, &self.m22, &o.m22),
        )
    }

    pub fn is_anti_diagonal(&self) -> bool {
        self.m11.is_zero() && self.m22.is_zero()
    }

    /// Largest Euclidean norm of a row (the gradient of one component).
    pub fn max_row_norm(&self) -> S {
        S::max_of(
            S::hypot(&self.m11, &self.m12),
            S::hypot(&self.m21, &self.m22),
        )
    }

    pub fn max_entry(&self) -> S {
        let a = S::max_of(self.m11.abs(), self.m12.abs());
        let b = S::max_of(self.m21.abs(), self.m22.abs());
        S::max_of(a, b)
    }

    pub fn to_f64(&self) -> Mat2<f64> {
        Mat2::new(
            self.m11.to_f64(),
            self.m12.to_f64(),
            self.m21.to_f64(),
            self.m22.to_f64(),
        )
    }
}

impl Mat2<f64> {
    pub fn frobenius(&self) -> f64 {
        (self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22)
            .sqrt()
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        let f2 = self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22;
        let d = self.det();
        let disc = (f2 * f2 - 4.0 * d * d).max(0.0).sqrt();
        ((f2 + disc) / 2.0).sqrt()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Mat2::new(
            self.m11 - o.m11,
            self.m12 - o.m12,
            self.m21 - o.m21,
            self.m22 - o.m22,
        )
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }
}

/// `m · p`.
pub fn mat_apply<S: Scalar>(m: &Mat2<S>, p: &Point2<S>) -> Point2<S> {
    Point2::new(
        m.m11.clone() * p.x1.clone() + m.m12.clone() * p.x2.clone(),
        m.m21.clone() * p.x1.clone() + m.m22.clone() * p.x2.clone(),
    )
}

/// Closed axis-aligned rectangle `[lo.x1, hi.x1] × [lo.x2, hi.x2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect2<S> {
    pub lo: Point2<S>,
    pub hi: Point2<S>,
}

impl Copy for Rect2<f64> {}

impl<S: Scalar> Rect2<S> {
    pub fn new(lo: Point2<S>, hi: Point2<S>) -> Result<Self> {
        if lo.x1 > hi.x1 || lo.x2 > hi.x2 {
            return Err(Error::InvalidRect);
        }
        Ok(Rect2 { lo, hi })
    }

    pub fn from_bounds(x1lo: S, x1hi: S, x2lo: S, x2hi: S) -> Result<Self> {
        Rect2::new(Point2::new(x1lo, x2lo), Point2::new(x1hi, x2hi))
    }

    /// `center ± (h1, h2)`.
    pub fn centered(center: &Point2<S>, h1: &S, h2: &S) -> Self {
        Rect2 {
            lo: Point2::new(center.x1.clone() - h1.clone(), center.x2.clone() - h2.clone()),
            hi: Point2::new(center.x1.clone() + h1.clone(), center.x2.clone() + h2.clone()),
        }
    }

    pub fn width(&self) -> S {
        self.hi.x1.clone() - self.lo.x1.clone()
    }

    pub fn height(&self) -> S {
        self.hi.x2.clone() - self.lo.x2.clone()
    }

    pub fn area(&self) -> S {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2<S> {
        let two = S::from_i64(2);
        Point2::new(
            (self.lo.x1.clone() + self.hi.x1.clone()) / two.clone(),
            (self.lo.x2.clone() + self.hi.x2.clone()) / two,
        )
    }

    /// Corners in counter-clockwise order starting at `lo`.
    pub fn corners(&self) -> [Point2<S>; 4] {
        [
            self.lo.clone(),
            Point2::new(self.hi.x1.clone(), self.lo.x2.clone()),
            self.hi.clone(),
            Point2::new(self.lo.x1.clone(), self.hi.x2.clone()),
        ]
    }

    pub fn contains_rect(&self, other: &Self) -> bool {
        other.lo.x1 >= self.lo.x1
            && other.hi.x1 <= self.hi.x1
            && other.lo.x2 >= self.lo.x2
            && other.hi.x2 <= self.hi.x2
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo.x1 <= other.hi.x1
            && other.lo.x1 <= self.hi.x1
            && self.lo.x2 <= other.hi.x2
            && other.lo.x2 <= self.hi.x2
    }

    pub fn intersection(&self, other: &Self) -> Option<Self> {
        if !self.intersects(other) {
            return None;
        }
        Some(Rect2 {
            lo: Point2::new(
                S::max_of(self.lo.x1.clone(), other.lo.x1.clone()),
                S::max_of(self.lo.x2.clone(), other.lo.x2.clone()),
            ),
            hi: Point2::new(
                S::min_of(self.hi.x1.clone(), other.hi.x1.clone()),
                S::min_of(self.hi.x2.clone(), other.hi.x2.clone()),
            ),
        })
    }

    pub fn to_f64(&self) -> Rect2<f64> {
        Rect2 {
            lo: self.lo.to_f64(),
            hi: self.hi.to_f64(),
        }
    }
}

/// Membership test; `closed` decides whether the boundary belongs to `r`.
pub fn rect_contains<S: Scalar>(r: &Rect2<S>, p: &Point2<S>, closed: bool) -> bool {
    if closed {
        p.x1 >= r.lo.x1 && p.x1 <= r.hi.x1 && p.x2 >= r.lo.x2 && p.x2 <= r.hi.x2
    } else {
        p.x1 > r.lo.x1 && p.x1 < r.hi.x1 && p.x2 > r.lo.x2 && p.x2 < r.hi.x2
    }
}

impl Rect2<f64> {
    /// `[-1, 1]²`, the domain of the construction.
    pub fn unit_square() -> Self {
        Rect2 {
            lo: Point2::new(-1.0, -1.0),
            hi: Point2::new(1.0, 1.0),
        }
    }

    pub fn polygon(&self) -> Vec<P2> {
        self.corners().to_vec()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

/// A word in `{-1, +1}^k`, ordered lexicographically with `-1 < +1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignCode(Vec<i8>);

impl SignCode {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::EmptyCode);
        }
        if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidSign(bad));
        }
        Ok(SignCode(signs))
    }

    /// Constant word of length `k`.
    pub fn constant(sign: i8, k: usize) -> Result<Self> {
        SignCode::new(vec![sign; k])
    }

    /// Parses `"+-+"` style strings.
    pub fn parse(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(Error::InvalidCode(s.to_string())),
            })
            .collect::<Result<Vec<i8>>>()?;
        SignCode::new(signs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn prefix(&self, k: usize) -> Result<Self> {
        SignCode::new(self.0[..k.min(self.0.len())].to_vec())
    }

    pub fn negated(&self) -> Self {
        SignCode(self.0.iter().map(|s| -s).collect())
    }

    /// All `2^k` words of length `k` in lexicographic order.
    pub fn all(k: usize) -> Vec<SignCode> {
        (0..1usize << k)
            .map(|bits| {
                SignCode(
                    (0..k)
                        .map(|i| if bits >> (k - 1 - i) & 1 == 1 { 1 } else { -1 })
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for SignCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}
