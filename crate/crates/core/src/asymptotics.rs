//! Closed-form tail formulas: the rate function phi, the uniform lower-tail
//! asymptotics of log Q, the fixed-T expansion, the Tracy-Widom tail, the
//! naive estimate, the derivative asymptotics and the KPZ tail bracket.
//!
//! Everything goes through q(y) = sqrt(1 + pi^2 y) - 1.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::kernels::Params;

/// zeta'(-1), from a 50-digit evaluation with mpmath (`zeta(-1, derivative=1)`).
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_929_213_919_7;

/// Named terms of an asymptotic formula, in order, plus their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticBreakdown {
    pub terms: Vec<(&'static str, f64)>,
    pub total: f64,
}

impl AsymptoticBreakdown {
    pub fn from_terms(terms: Vec<(&'static str, f64)>) -> Self {
        let total = terms.iter().map(|(_, v)| v).sum();
        Self { terms, total }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBracket {
    pub lower_a: f64,
    pub upper_b: f64,
    pub s_tilde: f64,
    pub epsilon: f64,
}

/// q(y) = sqrt(1 + pi^2 y) - 1, written as pi^2 y/(sqrt(1 + pi^2 y) + 1).
pub fn q(y: f64) -> f64 {
    let z = PI * PI * y;
    z / ((1.0 + z).sqrt() + 1.0)
}

fn scaled_y(p: Params) -> f64 {
    let t13 = p.t13();
    p.s / (t13 * t13)
}

fn require_positive(p: Params) -> Result<()> {
    if !(p.s > 0.0) {
        return Err(Error::DomainError(format!("s must be > 0, got {}", p.s)));
    }
    Ok(())
}

/// phi(y) = (4/(15 pi^6))(1+pi^2 y)^{5/2} - 4/(15 pi^6) - (2/(3 pi^4)) y - y^2/(2 pi^2).
///
/// Substituting 1 + pi^2 y = (1+q)^2 cancels the subtracted Taylor terms
/// exactly, leaving (2q^3/3 + 5q^4/6 + 4q^5/15)/pi^6.
pub fn rate_phi(y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::DomainError(format!(
            "rate function needs y >= 0, got {y}"
        )));
    }
    let q = q(y);
    let q3 = q * q * q;
    Ok(q3 * (2.0 / 3.0 + q * (5.0 / 6.0 + q * (4.0 / 15.0))) / PI.powi(6))
}

/// -T^2 phi(s T^{-2/3}) - (1/6) sqrt(1 + pi^2 s T^{-2/3}).
pub fn log_q_asymptotic(p: Params) -> Result<AsymptoticBreakdown> {
    require_positive(p)?;
    let y = scaled_y(p);
    Ok(AsymptoticBreakdown::from_terms(vec![
        ("T2_phi", -p.t * p.t * rate_phi(y)?),
        ("sqrt_correction", -(1.0 + q(y)) / 6.0),
    ]))
}

/// Six-term large-s expansion at fixed T.
pub fn log_q_expansion_fixed_t(p: Params) -> Result<AsymptoticBreakdown> {
    require_positive(p)?;
    let (s, t) = (p.s, p.t);
    let t13 = p.t13();
    let rs = s.sqrt();
    Ok(AsymptoticBreakdown::from_terms(vec![
        ("s52", naive_estimate(p)?),
        ("s2", t13 * t13 / (2.0 * PI * PI) * s * s),
        ("s32", -2.0 * t / (3.0 * PI.powi(3)) * s * rs),
        ("s1", 2.0 * t * t13 / (3.0 * PI.powi(4)) * s),
        ("s12_pi", -PI / (6.0 * t13) * rs),
        ("s12_pi5", -t * t13 * t13 / (2.0 * PI.powi(5)) * rs),
    ]))
}

/// -s^3/12 - (1/8) ln s + (1/24) ln 2 + zeta'(-1).
pub fn tw_tail_expansion(s: f64) -> Result<AsymptoticBreakdown> {
    if !(s > 0.0) {
        return Err(Error::DomainError(format!("s must be > 0, got {s}")));
    }
    Ok(AsymptoticBreakdown::from_terms(vec![
        ("tw_cubic", -s * s * s / 12.0),
        ("tw_log", -s.ln() / 8.0),
        ("tw_const", LN_2 / 24.0 + ZETA_PRIME_MINUS_ONE),
    ]))
}

/// -(4/(15 pi)) T^{1/3} s^{5/2}.
pub fn naive_estimate(p: Params) -> Result<f64> {
    require_positive(p)?;
    Ok(-4.0 / (15.0 * PI) * p.t13() * p.s * p.s * p.s.sqrt())
}

/// Asymptotics of d/dT log Q.
pub fn dlogq_dt_asymptotic(p: Params) -> Result<AsymptoticBreakdown> {
    require_positive(p)?;
    let q = q(scaled_y(p));
    let pi6 = PI.powi(6);
    let t = p.t;
    Ok(AsymptoticBreakdown::from_terms(vec![
        ("T_q5", -4.0 * t / (45.0 * pi6) * q.powi(5)),
        ("T_q4", -t / (9.0 * pi6) * q.powi(4)),
        ("T_sqrt", (1.0 + q) / (18.0 * t)),
    ]))
}

/// Asymptotics of d/ds log Q.
pub fn dlogq_ds_asymptotic(p: Params) -> Result<AsymptoticBreakdown> {
    require_positive(p)?;
    let q = q(scaled_y(p));
    let pi4 = PI.powi(4);
    let t43 = p.t * p.t13();
    Ok(AsymptoticBreakdown::from_terms(vec![
        ("s_q3", -2.0 * t43 / (3.0 * pi4) * q.powi(3)),
        ("s_q2", -t43 / pi4 * q * q),
        ("s_inv_sqrt", -PI / (12.0 * p.s.sqrt() * p.t13())),
    ]))
}

/// Bracket A <= log P(lower tail) <= B.
///
/// B = log Q(s) + 1 (Markov). For the lower bound, P >= Q(s~) - R with
/// s~ = s + (3+eps) T^{-1/3} ln s and ln R = -s^{3+eps}; once R <= Q(s~)/2
/// this gives P >= Q(s~)/2, i.e. A = log Q(s~) - ln 2. If the remainder is
/// not yet dominated the bracket is refused.
pub fn kpz_tail_bracket<F>(p: Params, epsilon: f64, q_eval: F) -> Result<TailBracket>
where
    F: Fn(Params) -> Result<f64>,
{
    if !(p.s > 1.0) {
        return Err(Error::DomainError(format!(
            "tail bracket needs s > 1, got {}",
            p.s
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    let upper_b = q_eval(p)? + 1.0;
    let s_tilde = p.s + (3.0 + epsilon) * p.tau() * p.s.ln();
    let q_tilde = q_eval(Params::new(s_tilde, p.t)?)?;
    let log_remainder = -p.s.powf(3.0 + epsilon);
    let threshold = q_tilde - LN_2;
    if log_remainder > threshold {
        return Err(Error::DominanceNotEstablished {
            log_remainder,
            threshold,
        });
    }
    let lower_a = q_tilde - LN_2;
    if !(lower_a <= upper_b) {
        return Err(Error::NoConvergence(format!(
            "bracket inverted: A = {lower_a} > B = {upper_b}"
        )));
    }
    Ok(TailBracket {
        lower_a,
        upper_b,
        s_tilde,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq(s: f64, t: f64) -> Params {
        Params::new(s, t).unwrap()
    }

    fn phi_raw(y: f64) -> f64 {
        let pi = PI;
        4.0 / (15.0 * pi.powi(6)) * (1.0 + pi * pi * y).powf(2.5)
            - 4.0 / (15.0 * pi.powi(6))
            - 2.0 / (3.0 * pi.powi(4)) * y
            - y * y / (2.0 * pi * pi)
    }

    #[test]
    fn phi_matches_defining_formula() {
        for y in [0.5, 1.0, 7.0, 100.0, 1e4] {
            let a = rate_phi(y).unwrap();
            assert!((a / phi_raw(y) - 1.0).abs() < 1e-12, "y={y}");
        }
        assert!(rate_phi(-1e-3).is_err());
    }

    #[test]
    fn phi_flat_at_origin() {
        // one-sided differences; the cubic onset needs h small enough that h/2 <= 1e-8
        let h = 1e-8;
        let f = |y: f64| rate_phi(y).unwrap();
        assert_eq!(f(0.0), 0.0);
        assert!(((f(h) - f(0.0)) / h).abs() <= 1e-8);
        assert!(((f(2.0 * h) - 2.0 * f(h) + f(0.0)) / (h * h)).abs() <= 1e-8);
    }

    #[test]
    fn phi_limits() {
        let y: f64 = 0.01;
        assert!((rate_phi(y).unwrap() / (y.powi(3) / 12.0) - 1.0).abs() <= 0.05);
        let y: f64 = 1e4;
        assert!((rate_phi(y).unwrap() / (4.0 / (15.0 * PI) * y.powf(2.5)) - 1.0).abs() <= 0.05);
    }

    #[test]
    fn fixed_t_terms_at_six() {
        let b = log_q_expansion_fixed_t(pq(6.0, 1.0)).unwrap();
        let expect = [-7.486, 1.824, -0.316, 0.0411, -1.282, -0.0040];
        for ((_, v), e) in b.terms.iter().zip(expect) {
            assert!((v - e).abs() <= 5e-4 * e.abs().max(1.0), "{v} vs {e}");
        }
        assert_eq!(
            b.term("s52").unwrap(),
            naive_estimate(pq(6.0, 1.0)).unwrap()
        );
        let signs: Vec<bool> = b.terms.iter().map(|(_, v)| *v > 0.0).collect();
        assert_eq!(signs, vec![false, true, false, true, false, false]);
    }

    #[test]
    fn tw_tail_at_six() {
        let b = tw_tail_expansion(6.0).unwrap();
        let expect = -18.0 - 6f64.ln() / 8.0 + LN_2 / 24.0 + ZETA_PRIME_MINUS_ONE;
        assert!((b.total - expect).abs() < 1e-14);
        let cubic = b.term("tw_cubic").unwrap().abs();
        assert!(
            cubic > b.term("tw_log").unwrap().abs() && cubic > b.term("tw_const").unwrap().abs()
        );
    }

    #[test]
    fn naive_value() {
        assert!((naive_estimate(pq(1.0, 1.0)).unwrap() + 4.0 / (15.0 * PI)).abs() < 1e-16);
        assert!((naive_estimate(pq(1.0, 1.0)).unwrap() + 0.08488).abs() < 1e-5);
        let s = 1e4;
        let ratio =
            naive_estimate(pq(s, 1.0)).unwrap() / log_q_asymptotic(pq(s, 1.0)).unwrap().total;
        assert!((ratio - 1.0).abs() <= 0.1);
    }

    #[test]
    fn ds_terms_at_five() {
        let b = dlogq_ds_asymptotic(pq(5.0, 1.0)).unwrap();
        let expect = [-1.55, -0.381, -0.117];
        for ((_, v), e) in b.terms.iter().zip(expect) {
            assert!((v - e).abs() <= 0.01 * e.abs(), "{v} vs {e}");
        }
    }

    #[test]
    fn dt_sign_and_scaling() {
        assert!(dlogq_dt_asymptotic(pq(10.0, 1.0)).unwrap().total < 0.0);
        // at fixed y the first term is linear in T
        let y = 3.0;
        let t1: f64 = 2.0;
        let t2: f64 = 5.0;
        let a = dlogq_dt_asymptotic(pq(y * t1.powf(2.0 / 3.0), t1))
            .unwrap()
            .term("T_q5")
            .unwrap();
        let b = dlogq_dt_asymptotic(pq(y * t2.powf(2.0 / 3.0), t2))
            .unwrap()
            .term("T_q5")
            .unwrap();
        assert!((a / b - t1 / t2).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_against_fixed_t() {
        let p = pq(100.0, 1.0);
        let a = log_q_asymptotic(p).unwrap().total;
        let b = log_q_expansion_fixed_t(p).unwrap().total;
        assert!((a - b).abs() <= 0.05 * a.abs());
        // T^2 scaling of the leading piece at fixed y
        let y = 2.0;
        let f = |t: f64| {
            log_q_asymptotic(pq(y * t.powf(2.0 / 3.0), t))
                .unwrap()
                .term("T2_phi")
                .unwrap()
        };
        assert!((f(3.0) / f(1.5) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_basics() {
        let asym = |p: Params| log_q_asymptotic(p).map(|b| b.total);
        let b = kpz_tail_bracket(pq(10.0, 1.0), 0.1, asym).unwrap();
        assert!(b.lower_a <= b.upper_b);
        assert!((b.s_tilde - (10.0 + 3.1 * 10f64.ln())).abs() < 1e-12);
        assert!(kpz_tail_bracket(pq(1.0, 1.0), 0.1, asym).is_err());
        // a q_eval that decays too fast cannot dominate the remainder
        let steep = |p: Params| Ok(-p.s.powi(5));
        assert!(matches!(
            kpz_tail_bracket(pq(4.0, 1.0), 0.1, steep),
            Err(Error::DominanceNotEstablished { .. })
        ));
    }

    #[test]
    fn bracket_width_growth() {
        let asym = |p: Params| log_q_asymptotic(p).map(|b| b.total);
        let ratios: Vec<f64> = [10.0f64, 30.0, 100.0]
            .iter()
            .map(|&s| {
                let b = kpz_tail_bracket(pq(s, 1.0), 0.1, asym).unwrap();
                (b.upper_b - b.lower_a) / (s.powf(1.5) * s.ln())
            })
            .collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 3.0, "{ratios:?}");
    }
}
