//! Ai and Ai' on the real line, and the Airy kernel.
//!
//! |x| <= 9 uses the Maclaurin series (double-double where cancellation
//! would cost digits), beyond that the asymptotic expansions: exponentially
//! scaled for x > 0, modulus/phase for x < 0. At |x| = 9 the asymptotic
//! series reach ~1e-16 before diverging.

use crate::error::{Error, Result};
use crate::numerics::{DoubleDouble, Real};

/// Largest |x| accepted by [`airy_eval`].
pub const AIRY_RANGE: f64 = 200.0;
const SERIES_LIMIT: f64 = 9.0;
// Inside [PLAIN_LO, PLAIN_HI] the f64 series loses fewer than ~3 digits.
const PLAIN_LO: f64 = -5.0;
const PLAIN_HI: f64 = 2.0;

const AI0: DoubleDouble = DoubleDouble::new(0.3550280538878172, 2.05233632436212e-17);
const MINUS_AIP0: DoubleDouble = DoubleDouble::new(0.2588194037928068, -2.522243111610832e-17);
const TWO_PI: DoubleDouble = DoubleDouble::new(std::f64::consts::TAU, 2.4492935982947064e-16);
const QUARTER_PI: DoubleDouble =
    DoubleDouble::new(std::f64::consts::FRAC_PI_4, 3.061616997868383e-17);
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Diagonal-switch threshold of the kernel, relative to 1 + |u|.
pub const DIAGONAL_SWITCH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub ai: f64,
    pub ai_prime: f64,
}

/// Ai(x), Ai'(x) for |x| <= 200.
pub fn airy_eval(x: f64) -> Result<AiryPair> {
    if !(x.abs() <= AIRY_RANGE) {
        return Err(Error::RangeExceeded {
            x,
            limit: AIRY_RANGE,
        });
    }
    Ok(airy_unchecked(x))
}

/// Same as [`airy_eval`] but returns zeros far to the right instead of an
/// error; used in kernel assembly where such arguments are negligible.
pub fn airy_or_zero(x: f64) -> Result<AiryPair> {
    if x > AIRY_RANGE {
        return Ok(AiryPair {
            ai: 0.0,
            ai_prime: 0.0,
        });
    }
    airy_eval(x)
}

fn airy_unchecked(x: f64) -> AiryPair {
    if x.abs() <= SERIES_LIMIT {
        if (PLAIN_LO..=PLAIN_HI).contains(&x) {
            maclaurin::<f64>(x)
        } else {
            maclaurin::<DoubleDouble>(x)
        }
    } else if x > 0.0 {
        asymptotic_positive(x)
    } else {
        asymptotic_negative(-x)
    }
}

fn maclaurin<R: Real>(x: f64) -> AiryPair {
    let xr = R::from_f64(x);
    let x3 = xr * xr * xr;
    // f, g are the two power-series solutions; fp, gp their derivatives.
    let mut t = R::one();
    let mut f = t;
    let mut u = xr;
    let mut g = u;
    let mut p = xr * xr.div_f64(2.0);
    let mut fp = p;
    let mut q = R::one();
    let mut gp = q;
    let tiny = R::UNIT_ROUNDOFF * 1e-3;
    for k in 0..200 {
        let kf = k as f64;
        t = (t * x3).div_f64((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        f += t;
        u = (u * x3).div_f64((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        g += u;
        let k1 = kf + 1.0;
        p = (p * x3).div_f64(3.0 * k1 * (3.0 * k1 + 2.0));
        fp += p;
        q = (q * x3).div_f64((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        gp += q;
        let scale = f.abs().to_f64() + g.abs().to_f64() + fp.abs().to_f64() + gp.abs().to_f64();
        let largest = t
            .abs()
            .to_f64()
            .max(u.abs().to_f64())
            .max(p.abs().to_f64())
            .max(q.abs().to_f64());
        if k >= 2 && largest <= tiny * scale {
            break;
        }
    }
    let c1 = R::from_f64(AI0.hi) + R::from_f64(AI0.lo);
    let c2 = R::from_f64(MINUS_AIP0.hi) + R::from_f64(MINUS_AIP0.lo);
    AiryPair {
        ai: (c1 * f - c2 * g).to_f64(),
        ai_prime: (c1 * fp - c2 * gp).to_f64(),
    }
}

/// Coefficients u_k, v_k of the large-argument expansions.
fn asymptotic_coefficients(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = Vec::with_capacity(count);
    let mut v = Vec::with_capacity(count);
    u.push(1.0);
    v.push(1.0);
    for k in 1..count {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    (u, v)
}

const N_COEF: usize = 48;

fn coefficients() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static COEF: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    COEF.get_or_init(|| asymptotic_coefficients(N_COEF))
}

/// Sum c_k (sign)^k / zeta^k over the indices `start, start+step, ...`,
/// stopping when terms fall below roundoff or start to grow.
fn truncated_sum(c: &[f64], zeta: f64, start: usize, step: usize, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut sign = 1.0;
    let mut k = start;
    while k < c.len() {
        let term = c[k] / zeta.powi(k as i32);
        if term.abs() > prev {
            break;
        }
        sum += sign * term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        prev = term.abs();
        if alternate {
            sign = -sign;
        }
        k += step;
    }
    sum
}

fn asymptotic_positive(x: f64) -> AiryPair {
    let (u, v) = coefficients();
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let su = truncated_sum(u, zeta, 0, 1, true);
    let sv = truncated_sum(v, zeta, 0, 1, true);
    let quarter = x.sqrt().sqrt();
    // Fold the prefactors into the exponent so nothing underflows early.
    let base = -zeta - (2.0 * SQRT_PI).ln();
    AiryPair {
        ai: (base - quarter.ln()).exp() * su,
        ai_prime: -(base + quarter.ln()).exp() * sv,
    }
}

fn asymptotic_negative(z: f64) -> AiryPair {
    let (u, v) = coefficients();
    let zd = DoubleDouble::from(z);
    let zeta_dd = (zd * zd.sqrt()).mul_f64(2.0).div_f64(3.0);
    let mut theta = zeta_dd - QUARTER_PI;
    let turns = (theta.hi / TWO_PI.hi).round();
    theta -= TWO_PI.mul_f64(turns);
    let (sin_t, cos_t) = theta.to_f64().sin_cos();
    let zeta = zeta_dd.to_f64();
    let pu = truncated_sum(u, zeta, 0, 2, true);
    let qu = truncated_sum(u, zeta, 1, 2, true);
    let pv = truncated_sum(v, zeta, 0, 2, true);
    let qv = truncated_sum(v, zeta, 1, 2, true);
    let quarter = z.sqrt().sqrt();
    AiryPair {
        ai: (cos_t * pu + sin_t * qu) / (SQRT_PI * quarter),
        ai_prime: quarter / SQRT_PI * (sin_t * pv - cos_t * qv),
    }
}

/// K(u,u) = Ai'(u)^2 - u Ai(u)^2.
pub fn airy_kernel_diagonal(u: f64) -> Result<f64> {
    let p = airy_or_zero(u)?;
    Ok(diagonal_from(u, p))
}

#[inline]
fn diagonal_from(u: f64, p: AiryPair) -> f64 {
    p.ai_prime * p.ai_prime - u * p.ai * p.ai
}

/// The Airy kernel (Ai(u)Ai'(v) - Ai'(u)Ai(v))/(u - v).
///
/// Near the diagonal it returns K(m, m) at the midpoint m = (u+v)/2, which
/// equals K(u,u) plus the first-order correction -(v-u)Ai(u)^2/2 up to
/// O((v-u)^2) and is exactly symmetric.
pub fn airy_kernel(u: f64, v: f64) -> Result<f64> {
    for x in [u, v] {
        if !(x.abs() <= AIRY_RANGE) {
            return Err(Error::RangeExceeded {
                x,
                limit: AIRY_RANGE,
            });
        }
    }
    if is_near_diagonal(u, v) {
        return airy_kernel_diagonal(0.5 * (u + v));
    }
    Ok(kernel_off_diagonal(
        u,
        airy_unchecked(u),
        v,
        airy_unchecked(v),
    ))
}

#[inline]
pub(crate) fn is_near_diagonal(u: f64, v: f64) -> bool {
    (u - v).abs() <= DIAGONAL_SWITCH * (1.0 + u.abs().min(v.abs()))
}

#[inline]
fn kernel_off_diagonal(u: f64, pu: AiryPair, v: f64, pv: AiryPair) -> f64 {
    (pu.ai * pv.ai_prime - pu.ai_prime * pv.ai) / (u - v)
}

/// Kernel value from Airy values already computed at both points.
pub fn kernel_from_pairs(u: f64, pu: AiryPair, v: f64, pv: AiryPair) -> Result<f64> {
    if u == v {
        Ok(diagonal_from(u, pu))
    } else if is_near_diagonal(u, v) {
        airy_kernel_diagonal(0.5 * (u + v))
    } else {
        Ok(kernel_off_diagonal(u, pu, v, pv))
    }
}
