//! Numeric scalars used by the construction.
//!
//! Every constant of the construction is rational (most are dyadic), so the
//! same code runs either over `f64` or over [`Exact`] big rationals. Structural
//! checks (involution, seam gluing) use `Exact`; quadrature uses `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Arithmetic needed by the construction: an ordered field with cheap powers
/// of two and a lossy bridge to `f64`.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic never rounds.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `p / q`; `q` must be nonzero.
    fn ratio(p: i64, q: i64) -> Self;
    /// `2^e` for any integer `e`.
    fn pow2(e: i32) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact for [`Exact`] (every finite double is a dyadic rational).
    fn from_f64(v: f64) -> Self;
    fn abs(&self) -> Self;

    /// Euclidean length of `(x, y)`. Exact when one argument vanishes.
    fn hypot(x: &Self, y: &Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn signum(&self) -> i32 {
        match self.partial_cmp(&Self::zero()) {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => 0,
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn pow2(e: i32) -> Self {
        2f64.powi(e)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn hypot(x: &Self, y: &Self) -> Self {
        f64::hypot(*x, *y)
    }
}

/// Arbitrary-precision rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn new(numer: BigInt, denom: BigInt) -> Self {
        Exact(BigRational::new(numer, denom))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// `true` when the reduced denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        let d = self.0.denom();
        let bits = d.bits();
        bits > 0 && *d == BigInt::one() << (bits - 1) as usize
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Exact {
            type Output = Exact;
            fn $m(self, rhs: Exact) -> Exact {
                Exact($tr::$m(self.0, rhs.0))
            }
        }
        impl<'a> $tr<&'a Exact> for &'a Exact {
            type Output = Exact;
            fn $m(self, rhs: &'a Exact) -> Exact {
                Exact($tr::$m(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact(-self.0)
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Exact(BigRational::zero())
    }
    fn one() -> Self {
        Exact(BigRational::one())
    }
    fn from_i64(v: i64) -> Self {
        Exact(BigRational::from_integer(BigInt::from(v)))
    }
    fn ratio(p: i64, q: i64) -> Self {
        Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }
    fn pow2(e: i32) -> Self {
        let m = BigInt::one() << e.unsigned_abs() as usize;
        if e >= 0 {
            Exact(BigRational::from_integer(m))
        } else {
            Exact(BigRational::new(BigInt::one(), m))
        }
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn from_f64(v: f64) -> Self {
        Exact(BigRational::from_f64(v).expect("finite float"))
    }
    fn abs(&self) -> Self {
        Exact(self.0.abs())
    }
    fn hypot(x: &Self, y: &Self) -> Self {
        if x.0.is_zero() {
            return y.abs();
        }
        if y.0.is_zero() {
            return x.abs();
        }
        Self::from_f64(f64::hypot(x.to_f64(), y.to_f64()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}
