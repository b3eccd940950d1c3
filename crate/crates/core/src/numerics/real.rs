use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::dd::DoubleDouble;

/// Scalar abstraction over the two working precisions.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Unit roundoff of the representation.
    const UNIT_ROUNDOFF: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn hypot(self, other: Self) -> Self;
    fn ln_1p(self) -> Self;
    fn mul_f64(self, x: f64) -> Self;
    fn div_f64(self, x: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Real for f64 {
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn hypot(self, other: Self) -> Self {
        f64::hypot(self, other)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    #[inline]
    fn mul_f64(self, x: f64) -> Self {
        self * x
    }
    #[inline]
    fn div_f64(self, x: f64) -> Self {
        self / x
    }
}

impl Real for DoubleDouble {
    const UNIT_ROUNDOFF: f64 = DoubleDouble::EPSILON;

    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    #[inline]
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    #[inline]
    fn hypot(self, other: Self) -> Self {
        DoubleDouble::hypot(self, other)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        DoubleDouble::ln_1p(self)
    }
    #[inline]
    fn mul_f64(self, x: f64) -> Self {
        DoubleDouble::mul_f64(self, x)
    }
    #[inline]
    fn div_f64(self, x: f64) -> Self {
        DoubleDouble::div_f64(self, x)
    }
}
