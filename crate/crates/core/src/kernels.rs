//! The Fermi factor and the two deformed Airy kernels.

use crate::airy::{airy_kernel, airy_or_zero};
use crate::error::{Error, Result};
use crate::numerics::{composite_gauss_legendre, Domain, QuadratureRule};

/// Evaluation point (s, T).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub s: f64,
    pub t: f64,
}

impl Params {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidInput(format!("s must be finite, got {s}")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput(format!(
                "T must be finite and > 0, got {t}"
            )));
        }
        Ok(Self { s, t })
    }

    /// T^{1/3}
    pub fn t13(&self) -> f64 {
        self.t.cbrt()
    }

    /// Width T^{-1/3} of the Fermi transition in the kernel variable.
    pub fn tau(&self) -> f64 {
        1.0 / self.t.cbrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelRep {
    SigmaWeighted,
    FiniteTemperature,
}

impl KernelRep {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelRep::SigmaWeighted => "sigma",
            KernelRep::FiniteTemperature => "finite-t",
        }
    }
}

/// sigma(r) = 1/(1 + e^{-r}), without overflow for either sign.
#[inline]
pub fn fermi(r: f64) -> f64 {
    if r >= 0.0 {
        1.0 / (1.0 + (-r).exp())
    } else {
        let e = r.exp();
        e / (1.0 + e)
    }
}

/// sigma'(r) = sigma(r) sigma(-r).
#[inline]
pub fn fermi_prime(r: f64) -> f64 {
    let e = (-r.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// ln(1 - sigma(r)) = -ln(1 + e^r).
#[inline]
pub fn log_one_minus_fermi(r: f64) -> f64 {
    if r > 0.0 {
        -(r + (-r).exp().ln_1p())
    } else {
        -r.exp().ln_1p()
    }
}

/// sqrt(sigma(T^{1/3}(x+s))) K^Ai(x,y) sqrt(sigma(T^{1/3}(y+s))).
pub fn sigma_weighted_kernel(x: f64, y: f64, p: Params) -> Result<f64> {
    let k = airy_kernel(x, y)?;
    let t13 = p.t13();
    // weights multiplied first so the result is exactly symmetric
    let weight = fermi(t13 * (x + p.s)).sqrt() * fermi(t13 * (y + p.s)).sqrt();
    Ok(weight * k)
}

/// K^Ai(x,y) restricted to (-s, inf) x (-s, inf).
pub fn indicator_kernel(x: f64, y: f64, s: f64) -> Result<f64> {
    if x <= -s || y <= -s {
        return Ok(0.0);
    }
    airy_kernel(x, y)
}

/// sigma(T^{1/3} r) <= e^{-40} for r below -LEFT_CUTOFF T^{-1/3}.
pub const LEFT_CUTOFF: f64 = 40.0;
/// Ai(x)^2 < 1e-26 for x beyond this; sets the right end of the r-range.
pub const AIRY_NEGLIGIBLE: f64 = 11.0;
const POINTS_PER_PANEL: usize = 16;

/// Panel width for the r-integral at position r. Panels resolve the Fermi
/// transition near r = 0 and half an oscillation of Ai(u_min + r).
fn panel_width(r: f64, u_min: f64, tau: f64) -> f64 {
    let mut w: f64 = 1.0;
    let arg = u_min + r;
    if arg < -1.0 {
        w = w.min(std::f64::consts::PI / (-arg).sqrt());
    }
    w.min(0.5 * r.hypot(std::f64::consts::PI * tau))
}

/// Composite rule in r for the finite-temperature kernel, valid for all
/// kernel arguments >= `u_min`. Covers [-40 T^{-1/3}, 11 - u_min] with a
/// breakpoint at r = 0.
pub fn temperature_rule(p: Params, u_min: f64) -> Result<QuadratureRule> {
    let tau = p.tau();
    let lo = -LEFT_CUTOFF * tau;
    let hi = (AIRY_NEGLIGIBLE - u_min).max(AIRY_NEGLIGIBLE);
    let mut right = vec![0.0];
    let mut r = 0.0;
    while r < hi {
        r = (r + panel_width(r, u_min, tau)).min(hi);
        right.push(r);
    }
    let mut left = Vec::new();
    let mut r = 0.0;
    while r > lo {
        r = (r - panel_width(r, u_min, tau)).max(lo);
        left.push(r);
    }
    left.reverse();
    left.extend(right);
    composite_gauss_legendre(&left, POINTS_PER_PANEL)
}

/// Weights already multiplied by sigma(T^{1/3} r).
pub fn fermi_weighted(rule: &QuadratureRule, p: Params) -> Vec<f64> {
    let t13 = p.t13();
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&r, &w)| w * fermi(t13 * r))
        .collect()
}

/// Check that `rule` covers what the kernel at arguments >= u_min needs.
pub fn check_temperature_rule(rule: &QuadratureRule, p: Params, u_min: f64) -> Result<()> {
    let (a, b) = match rule.domain {
        Domain::Composite { a, b } | Domain::Interval { a, b } => (a, b),
        Domain::Truncated { a, width } => (a, a + width),
        Domain::HalfLine { .. } => (f64::NEG_INFINITY, f64::INFINITY),
    };
    let need_lo = -LEFT_CUTOFF * p.tau();
    let need_hi = AIRY_NEGLIGIBLE - u_min;
    if a > need_lo * (1.0 - 1e-12) || b < need_hi {
        return Err(Error::TruncationTooTight(format!(
            "r-range [{a}, {b}] does not cover [{need_lo}, {need_hi}]"
        )));
    }
    Ok(())
}

/// K^Ai_T(u,v) = int sigma(T^{1/3} r) Ai(u+r) Ai(v+r) dr on the given r-rule.
pub fn finite_temperature_kernel(u: f64, v: f64, p: Params, rule: &QuadratureRule) -> Result<f64> {
    check_temperature_rule(rule, p, u.min(v))?;
    let t13 = p.t13();
    let mut acc = 0.0;
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let au = airy_or_zero(u + r)?.ai;
        let av = if u == v { au } else { airy_or_zero(v + r)?.ai };
        acc += w * fermi(t13 * r) * au * av;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::airy_eval;
    use crate::numerics::{integrate, Tolerance};

    #[test]
    fn fermi_identities() {
        assert_eq!(fermi(0.0), 0.5);
        for r in [0.3, 7.0, 40.0] {
            assert!((fermi(r) + fermi(-r) - 1.0).abs() < 1e-16);
        }
        for x in [1.0f64, -1.0, 10.0, -10.0] {
            let step = if x > 0.0 { 1.0 } else { 0.0 };
            assert!((fermi(x) - step).abs() <= (-x.abs()).exp());
        }
        assert_eq!(fermi(1e6), 1.0);
        assert_eq!(fermi(-1e6), 0.0);
        assert!((fermi_prime(0.0) - 0.25).abs() < 1e-16);
        assert!((log_one_minus_fermi(800.0) + 800.0).abs() < 1e-12);
        assert!((log_one_minus_fermi(0.0) - 0.5f64.ln()).abs() < 1e-16);
    }

    #[test]
    fn sigma_weighted_limits() {
        let p = Params::new(0.0, 1.0).unwrap();
        assert_eq!(
            sigma_weighted_kernel(1.3, -0.4, p).unwrap(),
            sigma_weighted_kernel(-0.4, 1.3, p).unwrap()
        );
        let far = Params::new(50.0, 1.0).unwrap();
        let ratio = sigma_weighted_kernel(0.0, 0.0, far).unwrap() / airy_kernel(0.0, 0.0).unwrap();
        assert!((ratio - 1.0).abs() <= 1e-12);
        let scale = airy_kernel(-40.0, -40.0).unwrap();
        assert!(
            sigma_weighted_kernel(-40.0, -40.0, p).unwrap()
                <= (-40f64).exp() * scale * (1.0 + 1e-14)
        );
    }

    #[test]
    fn indicator_matches_airy_kernel_on_domain() {
        let s = 2.0;
        assert_eq!(
            indicator_kernel(0.5, -1.0, s).unwrap(),
            airy_kernel(0.5, -1.0).unwrap()
        );
        assert_eq!(
            indicator_kernel(0.5, -1.0, s).unwrap(),
            indicator_kernel(-1.0, 0.5, s).unwrap()
        );
        assert!(indicator_kernel(-s + 0.1, -s + 0.1, s).unwrap() > 0.0);
        assert_eq!(indicator_kernel(-3.0, 0.0, s).unwrap(), 0.0);
    }

    fn kt_reference(u: f64, v: f64, p: Params) -> f64 {
        let t13 = p.t13();
        let f =
            |r: f64| fermi(t13 * r) * airy_eval(u + r).unwrap().ai * airy_eval(v + r).unwrap().ai;
        let lo = -60.0 * p.tau();
        let hi = 20.0 - u.min(v);
        let mut breaks: Vec<f64> = (0..200)
            .map(|k| lo + (hi - lo) * k as f64 / 200.0)
            .collect();
        breaks.push(0.0);
        integrate(f, lo, hi, &breaks, Tolerance::new(1e-16, 1e-13))
            .unwrap()
            .value
    }

    #[test]
    fn finite_temperature_against_adaptive_reference() {
        for &(t, u, v) in &[
            (1.0f64, 0.0f64, 0.0f64),
            (1.0, -5.0, 3.0),
            (0.5, -15.0, -14.0),
            (4.0, 10.0, 10.0),
            (1.0, -15.0, 10.0),
        ] {
            let p = Params::new(3.0, t).unwrap();
            let rule = temperature_rule(p, u.min(v)).unwrap();
            let k = finite_temperature_kernel(u, v, p, &rule).unwrap();
            let r = kt_reference(u, v, p);
            // Relative accuracy target on the diagonal scale.
            let scale = kt_reference(u, u, p)
                .abs()
                .max(kt_reference(v, v, p).abs())
                .sqrt()
                * kt_reference(u, u, p)
                    .abs()
                    .min(kt_reference(v, v, p).abs())
                    .sqrt();
            assert!(
                (k - r).abs() <= 1e-9 * scale.max(r.abs()),
                "T={t} u={u} v={v}: {k} vs {r}"
            );
        }
    }

    #[test]
    fn finite_temperature_symmetric_and_positive() {
        let p = Params::new(0.0, 1.0).unwrap();
        let rule = temperature_rule(p, -5.0).unwrap();
        assert_eq!(
            finite_temperature_kernel(-2.0, 1.5, p, &rule).unwrap(),
            finite_temperature_kernel(1.5, -2.0, p, &rule).unwrap()
        );
        for u in [-5.0, 0.0, 3.0] {
            assert!(finite_temperature_kernel(u, u, p, &rule).unwrap() > 0.0);
        }
    }

    #[test]
    fn large_temperature_approaches_hard_edge() {
        let aip0_sq = 0.066987483779663974144;
        // sigma(T^{1/3} r) smooths the step over width tau = T^{-1/3}; the
        // leading deviation is -F'(0) tau^2 pi^2/6 with F = Ai^2.
        let fprime0 = 2.0 * 0.35502805388781723926 * -0.25881940379280679841;
        let p = Params::new(0.0, 1e6).unwrap();
        let rule = temperature_rule(p, 0.0).unwrap();
        let k = finite_temperature_kernel(0.0, 0.0, p, &rule).unwrap();
        let tau = p.tau();
        let predicted = -fprime0 * tau * tau * std::f64::consts::PI.powi(2) / 6.0;
        assert!(
            ((k - aip0_sq) / predicted - 1.0).abs() < 0.02,
            "{} vs {}",
            k - aip0_sq,
            predicted
        );
        let p = Params::new(0.0, 1e9).unwrap();
        let rule = temperature_rule(p, 0.0).unwrap();
        let k = finite_temperature_kernel(0.0, 0.0, p, &rule).unwrap();
        assert!((k - aip0_sq).abs() <= 1e-6);
    }

    #[test]
    fn short_rule_rejected() {
        let p = Params::new(0.0, 1.0).unwrap();
        let rule = composite_gauss_legendre(&[-5.0, 0.0, 5.0], 8).unwrap();
        assert!(matches!(
            finite_temperature_kernel(0.0, 0.0, p, &rule),
            Err(Error::TruncationTooTight(_))
        ));
    }

    #[test]
    fn params_validated() {
        assert!(Params::new(1.0, 0.0).is_err());
        assert!(Params::new(f64::NAN, 1.0).is_err());
        assert!(Params::new(1.0, -2.0).is_err());
    }
}
