//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits of significand.

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.hi + self.lo)
    }
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const LN2: Self = Self {
        hi: std::f64::consts::LN_2,
        lo: 2.319046813846299558e-17,
    };
    pub const PI: Self = Self {
        hi: std::f64::consts::PI,
        lo: 1.224646799147353207e-16,
    };
    /// Unit roundoff, 2^-104.
    pub const EPSILON: f64 = 4.930380657631324e-32;

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    #[inline]
    pub fn from_product(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Self { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Multiplication by a power of two is exact.
    #[inline]
    pub fn scale_pow2(self, factor: f64) -> Self {
        Self::new(self.hi * factor, self.lo * factor)
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = self.lo.mul_add(b, e);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - DoubleDouble::from_product(q1, b);
        let q2 = r.hi / b;
        let r = r - DoubleDouble::from_product(q2, b);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::new(q3, 0.0)
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::new(f64::NAN, f64::NAN)
            };
        }
        let a = self.hi.sqrt();
        let (p, e) = two_prod(a, a);
        let diff = ((self.hi - p) - e) + self.lo;
        let (hi, lo) = quick_two_sum(a, diff / (2.0 * a));
        Self { hi, lo }
    }

    pub fn hypot(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.hi == 0.0 {
            return Self::ZERO;
        }
        // Scale by a power of two so the squares stay in range.
        let e = big.hi.log2().floor();
        let scale = (-e).exp2();
        let bs = big.scale_pow2(scale);
        let ss = small.scale_pow2(scale);
        (bs * bs + ss * ss).sqrt().scale_pow2(e.exp2())
    }

    pub fn exp(self) -> Self {
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi > 709.7 {
            return Self::new(f64::INFINITY, 0.0);
        }
        let k = (self.hi / Self::LN2.hi).round();
        let r = (self - Self::LN2.mul_f64(k)).scale_pow2(1.0 / 1024.0);
        // expm1 of the reduced argument by Taylor series.
        let mut term = r;
        let mut sum = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = (term * r).div_f64(n);
            sum += term;
            if term.hi.abs() <= 1e-36 * sum.hi.abs().max(1e-300) || n > 30.0 {
                break;
            }
        }
        // expm1(2x) = expm1(x) * (expm1(x) + 2)
        for _ in 0..10 {
            sum = sum * (sum + Self::new(2.0, 0.0));
        }
        let v = sum + Self::ONE;
        // Split the power of two so neither factor overflows or flushes early.
        let k1 = (k / 2.0).trunc();
        let k2 = k - k1;
        v.scale_pow2(k1.exp2()).scale_pow2(k2.exp2())
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::new(f64::NEG_INFINITY, 0.0)
            } else {
                Self::new(f64::NAN, f64::NAN)
            };
        }
        let y0 = Self::new(self.hi.ln(), 0.0);
        // One Newton step doubles the f64 accuracy.
        y0 + self * (-y0).exp() - Self::ONE
    }

    /// ln(1 + x), accurate for small x because 1 + x is formed exactly.
    pub fn ln_1p(self) -> Self {
        if self.hi.abs() < 1e-40 {
            return self;
        }
        (Self::ONE + self).ln()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::new(x, 0.0)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.hi, -self.lo)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::new(q3, 0.0)
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}
impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}
impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}
impl DivAssign for DoubleDouble {
    fn div_assign(&mut self, b: Self) {
        *self = *self / b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_keeps_low_bits() {
        let a = DoubleDouble::from(1.0) + DoubleDouble::from(1e-20);
        assert_eq!(a.hi, 1.0);
        assert_eq!(a.lo, 1e-20);
        assert_eq!((a - DoubleDouble::ONE).to_f64(), 1e-20);
    }

    #[test]
    fn third_times_three() {
        let third = DoubleDouble::ONE / DoubleDouble::from(3.0);
        let back = third * DoubleDouble::from(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_two_squared() {
        let r = DoubleDouble::from(2.0).sqrt();
        assert!((r * r - DoubleDouble::from(2.0)).to_f64().abs() < 1e-31);
        // high part agrees with f64
        assert_eq!(r.hi, 2f64.sqrt());
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[-30.0, -1.5, -1e-5, 0.0, 1e-9, 0.5, 1.0, 12.25, 300.0] {
            let d = DoubleDouble::from(x);
            let back = d.exp().ln();
            assert!(
                (back - d).to_f64().abs() <= 1e-30 * (1.0 + x.abs()),
                "x={x}"
            );
        }
        // e to 32 digits: 2.7182818284590452353602874713527
        let e = DoubleDouble::ONE.exp();
        let e_ref = DoubleDouble::new(std::f64::consts::E, 1.445646891729250158e-16);
        assert!((e - e_ref).to_f64().abs() < 1e-31);
    }

    #[test]
    fn ln_1p_tiny_argument() {
        let x = DoubleDouble::from(-3e-25);
        let y = x.ln_1p();
        assert!((y.to_f64() + 3e-25).abs() < 1e-40);
        let z = DoubleDouble::from(-0.25).ln_1p();
        // ln(0.75) = -0.28768207245178092743921900599383
        let r = DoubleDouble::new(-2.876820724517809e-01, -2.607160616442564e-17);
        assert!((z - r).to_f64().abs() < 1e-31);
    }

    #[test]
    fn hypot_matches() {
        let h = DoubleDouble::from(3e200).hypot(DoubleDouble::from(4e200));
        assert!((h.to_f64() / 5e200 - 1.0).abs() < 1e-15);
        let h = DoubleDouble::from(3.0).hypot(DoubleDouble::from(4.0));
        assert!((h - DoubleDouble::from(5.0)).to_f64().abs() < 1e-31);
    }
}
