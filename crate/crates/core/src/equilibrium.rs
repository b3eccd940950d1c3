//! Endpoint lambda0, the potential V, the density psi, the weight w, the
//! integrated combination 2g - V + V(lambda0), and the step-approximation
//! error functional.
//!
//! Integrals against d sigma(s T^{1/3} xi) are cut where |s T^{1/3} xi| > 45.

use std::f64::consts::PI;

use crate::asymptotics::q;
use crate::error::{Error, Result};
use crate::kernels::{fermi, fermi_prime, log_one_minus_fermi, Params};
use crate::numerics::{
    gauss_legendre, integrate, integrate_to_infinity, QuadratureRule, Tolerance,
};

/// sigma' < e^{-45} outside |u| <= 45.
const MEASURE_CUTOFF: f64 = 45.0;
const PANEL_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumData {
    pub p: Params,
    pub lambda0: f64,
    pub residual: f64,
    pub w_at_endpoint: f64,
}

impl EquilibriumData {
    /// a = s T^{1/3}
    fn a(&self) -> f64 {
        self.p.s * self.p.t13()
    }

    /// s^{-1/2} T^{1/3}
    fn coupling(&self) -> f64 {
        self.p.t13() / self.p.s.sqrt()
    }
}

fn require_positive_s(p: Params) -> Result<()> {
    if !(p.s > 0.0) {
        return Err(Error::DomainError(format!("s must be > 0, got {}", p.s)));
    }
    Ok(())
}

/// V(lambda) = s^{-3/2} ln(1 - sigma(s T^{1/3} lambda)).
pub fn potential_v(lambda: f64, p: Params) -> f64 {
    log_one_minus_fermi(p.s * p.t13() * lambda) / (p.s * p.s.sqrt())
}

/// V'(lambda) = -s^{-1/2} T^{1/3} sigma(s T^{1/3} lambda).
pub fn potential_v_prime(lambda: f64, p: Params) -> f64 {
    -p.t13() / p.s.sqrt() * fermi(p.s * p.t13() * lambda)
}

fn reference_panel() -> &'static QuadratureRule {
    use std::sync::OnceLock;
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_POINTS).expect("fixed positive order"))
}

/// (J(c), J'(c)) with J(c) = int_0^inf sigma(c - y^2) dy.
fn fermi_gaussian_integral(c: f64) -> (f64, f64) {
    if c <= -2.0 {
        // sigma(x) = sum_m (-1)^{m+1} e^{mx} for x < 0
        let mut j = 0.0;
        let mut jp = 0.0;
        for m in 1..60 {
            let mf = m as f64;
            let term = (mf * c).exp() * (PI / mf).sqrt() / 2.0;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            j += sign * term;
            jp += sign * mf * term;
            if term < 1e-18 * j.abs() {
                break;
            }
        }
        return (j, jp);
    }
    // Panels at y^2 = c + k resolve the Fermi transition.
    let mut breaks = vec![0.0];
    if c > MEASURE_CUTOFF + 3.0 {
        breaks.push((c - MEASURE_CUTOFF - 3.0).sqrt());
    }
    let kmin = (-c).max(-MEASURE_CUTOFF - 3.0).ceil() as i64;
    for k in kmin..=(MEASURE_CUTOFF as i64 + 3) {
        let y = (c + k as f64).sqrt();
        if y > *breaks.last().unwrap() {
            breaks.push(y);
        }
    }
    let rule = reference_panel();
    let mut j = 0.0;
    let mut jp = 0.0;
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let y = mid + half * t;
            let x = c - y * y;
            j += half * w * fermi(x);
            jp += half * w * fermi_prime(x);
        }
    }
    (j, jp)
}

/// Endpoint-equation defect and its derivative in lambda.
fn endpoint_function(lambda: f64, p: Params) -> (f64, f64) {
    let a = p.s * p.t13();
    let coef = 2.0 / PI * p.t.powf(1.0 / 6.0) / p.s;
    let (j, jp) = fermi_gaussian_integral(a * lambda);
    (lambda - 1.0 + coef * j, 1.0 + coef * a * jp)
}

/// Residual |F(lambda)| of the endpoint equation.
pub fn endpoint_residual(lambda: f64, p: Params) -> f64 {
    endpoint_function(lambda, p).0.abs()
}

const MAX_ITER: usize = 200;

/// Solve the endpoint equation on a bracket with a sign change.
pub fn solve_lambda0_in(p: Params, tol: f64, bracket: (f64, f64)) -> Result<EquilibriumData> {
    require_positive_s(p)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    let (mut lo, mut hi) = bracket;
    let (flo, _) = endpoint_function(lo, p);
    let (fhi, _) = endpoint_function(hi, p);
    if !(lo < hi) || flo * fhi > 0.0 {
        return Err(Error::InvalidInput(format!(
            "bracket [{lo}, {hi}] does not enclose a root"
        )));
    }
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    // Now F(lo) < 0 < F(hi) (lo may exceed hi).
    let mut x = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let (f, df) = endpoint_function(x, p);
        if f == 0.0 {
            converged = true;
            break;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / df;
        let inside = (newton - lo) * (newton - hi) < 0.0;
        let next = if inside && df > 0.0 {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= 2.0 * f64::EPSILON * x.abs().max(1e-3) {
            converged = true;
            break;
        }
    }
    let residual = endpoint_residual(x, p);
    if !converged || residual > tol {
        return Err(Error::NoConvergence(format!(
            "endpoint solve stopped at lambda = {x} with residual {residual:e}"
        )));
    }
    let mut eq = EquilibriumData {
        p,
        lambda0: x,
        residual,
        w_at_endpoint: f64::NAN,
    };
    eq.w_at_endpoint = w_at(x, &eq)?;
    Ok(eq)
}

/// Endpoint lambda0 by a bracketed Newton iteration. The root lies below 1;
/// the lower end starts at 0 and widens for small s.
pub fn solve_lambda0(p: Params, tol: f64) -> Result<EquilibriumData> {
    require_positive_s(p)?;
    let mut lo = 0.0;
    let mut width = 2.0;
    for _ in 0..60 {
        if endpoint_function(lo, p).0 < 0.0 {
            return solve_lambda0_in(p, tol, (lo, 1.0));
        }
        lo = -width;
        width *= 2.0;
    }
    Err(Error::NoConvergence(
        "could not bracket the endpoint from below".into(),
    ))
}

/// Closed-form main term T^{2/3}/(pi^2 s) (sqrt(1 + pi^2 s T^{-2/3}) - 1)^2.
pub fn lambda0_asymptotic(p: Params) -> Result<f64> {
    require_positive_s(p)?;
    let y = p.s / (p.t13() * p.t13());
    let q = q(y);
    Ok(q * q / (PI * PI * y))
}

fn check_tol() -> Tolerance {
    Tolerance {
        abs: 1e-14,
        rel: 1e-13,
        max_intervals: 4000,
    }
}

/// psi(lambda) in its log-kernel form, for lambda < lambda0.
pub fn psi(lambda: f64, eq: &EquilibriumData) -> Result<f64> {
    let delta = eq.lambda0 - lambda;
    if !(delta > 0.0) {
        return Err(Error::DomainError(format!(
            "psi needs lambda < lambda0 = {}, got {lambda}",
            eq.lambda0
        )));
    }
    let a = eq.a();
    let d = delta.sqrt();
    // xi = lambda0 - v^2, so d sigma(a xi) = 2 a v sigma'(a (lambda0 - v^2)) dv
    let v_lo = (eq.lambda0 - MEASURE_CUTOFF / a).max(0.0).sqrt();
    let v_hi = (eq.lambda0 + MEASURE_CUTOFF / a).max(0.0).sqrt();
    let f = |v: f64| {
        let weight = 2.0 * a * v * fermi_prime(a * (eq.lambda0 - v * v));
        if weight == 0.0 || v == d {
            return 0.0;
        }
        ((d + v) / (d - v).abs()).ln() * weight
    };
    let mut breaks = vec![d];
    if eq.lambda0 > 0.0 {
        breaks.push(eq.lambda0.sqrt());
    }
    let integral = if v_hi > v_lo {
        integrate(f, v_lo, v_hi, &breaks, check_tol())?.value
    } else {
        0.0
    };
    Ok(2.0 * d + eq.coupling() / PI * integral)
}

/// [sigma(x) - sigma(y)]/(x - y), stable when x and y are close.
fn fermi_difference_quotient(x: f64, y: f64) -> f64 {
    let diff = y - x;
    if diff == 0.0 {
        return fermi_prime(x);
    }
    if diff.abs() > 30.0 {
        return (fermi(x) - fermi(y)) / (x - y);
    }
    // sigma(x) - sigma(y) = -sigma(x) sigma(-y) expm1(y - x)
    fermi(x) * fermi(-y) * diff.exp_m1() / diff
}

/// w(lambda) for real lambda via the difference-quotient integrand.
pub fn w_at(lambda: f64, eq: &EquilibriumData) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::DomainError(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    let a = eq.a();
    let delta = eq.lambda0 - lambda;
    let y = a * lambda;
    let root = delta.max(0.0).sqrt();
    let v_cut = (eq.lambda0 + MEASURE_CUTOFF / a)
        .max(0.0)
        .sqrt()
        .max(root + 1.0);
    // 2 [sigma(a xi) - sigma(a lambda)]/(xi - lambda) with xi = lambda0 - v^2
    let f = |v: f64| {
        let x = a * (eq.lambda0 - v * v);
        2.0 * a * fermi_difference_quotient(x, y)
    };
    let mut breaks = vec![];
    if eq.lambda0 > 0.0 {
        breaks.push(eq.lambda0.sqrt());
    }
    if root > 0.0 {
        breaks.push(root);
    }
    let body = integrate(f, 0.0, v_cut, &breaks, check_tol())?.value;
    // Beyond v_cut sigma(a xi) < e^{-45}; the -sigma(a lambda) part is exact.
    let tail_kernel = if delta > 0.0 {
        -((2.0 * root / (v_cut - root)).ln_1p()) / root
    } else if delta < 0.0 {
        let r = (-delta).sqrt();
        -2.0 / r * (PI / 2.0 - (v_cut / r).atan())
    } else {
        -2.0 / v_cut
    };
    let tail = -fermi(y) * tail_kernel;
    Ok(1.0 + eq.coupling() / (2.0 * PI) * (body + tail))
}

/// 2 int_{lambda0}^{lambda} sqrt(eta - lambda0) w(eta) d eta, for lambda > lambda0.
pub fn g_combination(lambda: f64, eq: &EquilibriumData) -> Result<f64> {
    let span = lambda - eq.lambda0;
    if !(span > 0.0) {
        return Err(Error::DomainError(format!(
            "g_combination needs lambda > lambda0 = {}, got {lambda}",
            eq.lambda0
        )));
    }
    // eta = lambda0 + t^2
    let failure = std::cell::Cell::new(None);
    let f = |t: f64| match w_at(eq.lambda0 + t * t, eq) {
        Ok(w) => 4.0 * t * t * w,
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let value = integrate(
        f,
        0.0,
        span.sqrt(),
        &[],
        Tolerance {
            abs: 1e-13,
            rel: 1e-12,
            max_intervals: 400,
        },
    )?
    .value;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(value)
}

/// |int F(xi) sigma(r xi) d xi - int_0^inf F| for a test function F.
///
/// Uses sigma(r xi) - 1_{xi > 0} = sign(xi) sigma(-r|xi|) to write the
/// error as -(1/r) int_0^inf sigma(-u) [F(u/r) - F(-u/r)] du, which avoids
/// cancellation. `half_line_integral` is checked against quadrature.
pub fn step_lemma_error<F: Fn(f64) -> f64>(f: F, half_line_integral: f64, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::InvalidInput(format!("r must be >= 1, got {r}")));
    }
    let tol = Tolerance {
        abs: 1e-15,
        rel: 1e-12,
        max_intervals: 4000,
    };
    let check = integrate_to_infinity(&f, 0.0, tol)?;
    if (check.value - half_line_integral).abs() > 1e-8 * half_line_integral.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "supplied half-line integral {half_line_integral} disagrees with quadrature {}",
            check.value
        )));
    }
    let g = |u: f64| fermi(-u) * (f(u / r) - f(-u / r));
    let body = integrate(g, 0.0, 60.0, &[1.0, 5.0, 15.0], tol)?;
    Ok((body.value / r).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq(s: f64, t: f64) -> Params {
        Params::new(s, t).unwrap()
    }

    #[test]
    fn potential_basics() {
        let p = pq(4.0, 1.0);
        assert!((potential_v(0.0, p) - 0.5f64.ln() / 8.0).abs() < 1e-16);
        assert!(potential_v(-1.0, p) > potential_v(0.0, p));
        assert!(potential_v(0.0, p) > potential_v(1.0, p));
        let h = 1e-5;
        let fd = (potential_v(0.2 + h, p) - potential_v(0.2 - h, p)) / (2.0 * h);
        assert!((fd - potential_v_prime(0.2, p)).abs() <= 1e-8);
    }

    #[test]
    fn fermi_gaussian_matches_adaptive() {
        // Sommerfeld expansion for large c
        for c in [200.0, 9000.0] {
            let (j, jp) = fermi_gaussian_integral(c);
            let pi4 = PI.powi(4);
            let sj = c.sqrt() - PI * PI / 24.0 * c.powf(-1.5) - 7.0 * pi4 / 384.0 * c.powf(-3.5);
            let sjp =
                0.5 / c.sqrt() + PI * PI / 16.0 * c.powf(-2.5) + 49.0 * pi4 / 768.0 * c.powf(-4.5);
            assert!((j - sj).abs() <= 1e-10, "c={c}: {j} vs {sj}");
            assert!((jp - sjp).abs() <= 1e-11, "c={c}: {jp} vs {sjp}");
        }
        for c in [-5.0, -2.0, -1.0, 0.0, 0.7, 10.0, 40.0] {
            let (j, jp) = fermi_gaussian_integral(c);
            let top = (c.max(0.0) + 80.0).sqrt();
            let mid = [c.max(0.0).sqrt()];
            let tol = Tolerance::new(1e-15, 1e-14);
            let r = integrate(|y| fermi(c - y * y), 0.0, top, &mid, tol).unwrap();
            let rp = integrate(|y| fermi_prime(c - y * y), 0.0, top, &mid, tol).unwrap();
            assert!(
                (j - r.value).abs() <= 1e-12 * r.value.max(1.0),
                "c={c}: {j} vs {}",
                r.value
            );
            assert!(
                (jp - rp.value).abs() <= 1e-12 * rp.value.max(1.0),
                "c={c}: {jp} vs {}",
                rp.value
            );
        }
    }

    #[test]
    fn endpoint_examples() {
        let l1 = solve_lambda0(pq(10.0, 1.0), 1e-12).unwrap();
        let l10 = solve_lambda0(pq(10.0, 10.0), 1e-12).unwrap();
        let l100 = solve_lambda0(pq(100.0, 1.0), 1e-12).unwrap();
        for e in [&l1, &l10, &l100] {
            assert!(e.lambda0 < 1.0);
            assert!(e.residual <= 1e-12);
            assert!(e.w_at_endpoint >= 1.0);
        }
        assert!(l10.lambda0 < l1.lambda0);
        let asym = lambda0_asymptotic(pq(100.0, 1.0)).unwrap();
        assert!((l100.lambda0 - asym).abs() <= 5e-4);
    }

    #[test]
    fn endpoint_unique_across_brackets() {
        let p = pq(10.0, 1.0);
        let a = solve_lambda0_in(p, 1e-12, (0.0, 1.0)).unwrap();
        let b = solve_lambda0_in(p, 1e-12, (-3.0, 0.999)).unwrap();
        assert!((a.lambda0 - b.lambda0).abs() <= 1e-12);
        assert!(solve_lambda0_in(p, 1e-12, (0.99, 1.0)).is_err());
    }

    #[test]
    fn asymptotic_endpoint_algebra() {
        // pi^2 s T^{-2/3} = 3 gives exactly 1/3
        let p = pq(3.0 / (PI * PI), 1.0);
        assert!((lambda0_asymptotic(p).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((lambda0_asymptotic(pq(1e6, 1.0)).unwrap() - 1.0).abs() <= 2e-3);
        assert!(lambda0_asymptotic(pq(-1.0, 1.0)).is_err());
    }

    #[test]
    fn psi_properties() {
        let eq = solve_lambda0(pq(10.0, 1.0), 1e-12).unwrap();
        for lam in [-5.0, -1.0, 0.0, eq.lambda0 / 2.0] {
            assert!(psi(lam, &eq).unwrap() >= 2.0 * (eq.lambda0 - lam).sqrt());
        }
        // The log kernel decays like 2v/sqrt(lambda0 - lambda), so the excess
        // over 2 sqrt(lambda0 - lambda) falls off as |lambda|^{-1/2}.
        let excess = |lam: f64| psi(lam, &eq).unwrap() - 2.0 * (eq.lambda0 - lam).sqrt();
        let (e50, e5000) = (excess(-50.0), excess(-5000.0));
        assert!(e50 > 0.0 && e50 < 0.03, "{e50}");
        let ratio = e50 / e5000 / ((eq.lambda0 + 5000.0) / (eq.lambda0 + 50.0)).sqrt();
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
        assert!(matches!(psi(eq.lambda0, &eq), Err(Error::DomainError(_))));
    }

    #[test]
    fn w_consistent_with_psi() {
        let eq = solve_lambda0(pq(10.0, 1.0), 1e-12).unwrap();
        for lam in [eq.lambda0 / 2.0, -3.0, eq.lambda0 - 1e-3] {
            let lhs = 2.0 * (eq.lambda0 - lam).sqrt() * w_at(lam, &eq).unwrap();
            assert!((lhs - psi(lam, &eq).unwrap()).abs() <= 1e-6, "lambda={lam}");
        }
        let eq = solve_lambda0(pq(1e4, 1.0), 1e-12).unwrap();
        assert!((eq.w_at_endpoint - 1.0).abs() <= 1e-2);
    }

    #[test]
    fn w_continuous_through_endpoint() {
        let eq = solve_lambda0(pq(10.0, 1.0), 1e-12).unwrap();
        let l = eq.lambda0;
        let w0 = w_at(l, &eq).unwrap();
        assert!((w_at(l - 1e-9, &eq).unwrap() - w0).abs() < 1e-6);
        assert!((w_at(l + 1e-9, &eq).unwrap() - w0).abs() < 1e-6);
    }

    #[test]
    fn g_combination_properties() {
        let eq = solve_lambda0(pq(10.0, 1.0), 1e-12).unwrap();
        for d in [0.5, 1.0, 2.0] {
            let g = g_combination(eq.lambda0 + d, &eq).unwrap();
            assert!(g >= 4.0 / 3.0 * d * d.sqrt());
        }
        let d: f64 = 1e-3;
        let ratio = g_combination(eq.lambda0 + d, &eq).unwrap() / (4.0 / 3.0 * d.powf(1.5));
        assert!((ratio / eq.w_at_endpoint - 1.0).abs() <= 0.02);
        let lam = eq.lambda0 + 1.0;
        let h = 1e-4;
        let fd = (g_combination(lam + h, &eq).unwrap() - g_combination(lam - h, &eq).unwrap())
            / (2.0 * h);
        let exact = 2.0 * w_at(lam, &eq).unwrap();
        assert!((fd - exact).abs() <= 1e-6, "{fd} vs {exact}");
        assert!(g_combination(eq.lambda0, &eq).is_err());
    }

    #[test]
    fn step_lemma_odd_function_decays_quadratically() {
        let f = |x: f64| x * (-x * x).exp();
        let e1 = step_lemma_error(f, 0.5, 10.0).unwrap();
        let e2 = step_lemma_error(f, 0.5, 100.0).unwrap();
        let slope = (e2 / e1).log10();
        assert!((slope + 2.0).abs() < 0.05, "slope {slope}");
        // the leading constant is pi^2/6 F'(0)
        assert!((e2 * 1e4 / (PI * PI / 6.0) - 1.0).abs() < 1e-3);
        assert!(step_lemma_error(f, 0.7, 10.0).is_err());
    }

    #[test]
    fn step_lemma_even_function_is_exact() {
        let f = |x: f64| 1.0 / (1.0 + x * x);
        let e = step_lemma_error(f, PI / 2.0, 1000.0).unwrap();
        assert!(e <= 1e-5);
    }
}
