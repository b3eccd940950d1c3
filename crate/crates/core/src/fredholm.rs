//! Nystrom evaluation of log Q(s,T) = log det(1 - K) in both kernel
//! representations, the Tracy-Widom log-CDF, finite-difference logarithmic
//! derivatives and order scans.

use rayon::prelude::*;

use crate::airy::{airy_or_zero, kernel_from_pairs, AiryPair};
use crate::error::{Error, Result};
use crate::kernels::{fermi, fermi_weighted, temperature_rule, KernelRep, Params};
use crate::numerics::{
    gauss_legendre, log_det_one_minus, map_rule, Domain, DomainMap, DoubleDouble, Precision,
    QuadratureRule, Real, SymmetricMatrix,
};

pub const MIN_ORDER: usize = 8;

/// Scale of the exponential map on the Fermi side, in units of T^{-1/3}.
const LEFT_SCALE: f64 = 6.0;
/// Nodes with sigma below e^{-60} are dropped.
const LEFT_DROP: f64 = 60.0;
/// Beyond this the Airy factors are below 1e-200.
const RIGHT_DROP: f64 = 60.0;
/// Finite-temperature nodes with u > 45 T^{-1/3} + 12 carry no weight.
const FT_DROP_TAU: f64 = 45.0;
const FT_DROP_CONST: f64 = 12.0;
/// Right end of the Tracy-Widom window beyond max(x, 0).
const TW_WINDOW: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FredholmResult {
    pub log_det: f64,
    pub order: usize,
    pub rep: KernelRep,
    pub error_estimate: f64,
    pub precision: Precision,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub order: usize,
    pub log_det: f64,
    pub error_estimate: f64,
}

fn check_order(order: usize) -> Result<()> {
    if order < MIN_ORDER {
        return Err(Error::InvalidInput(format!(
            "order must be >= {MIN_ORDER}, got {order}"
        )));
    }
    Ok(())
}

/// Nodes for the sigma-weighted representation: the line split at x = -s
/// into an exponentially mapped left half (where sigma decays) with
/// `order + order/2` nodes and an algebraically mapped right half (where
/// the Airy kernel decays) with `order/2` nodes.
pub fn sigma_weighted_nodes(p: Params, order: usize) -> Result<QuadratureRule> {
    let tau = p.tau();
    let n_left = order + order / 2;
    let n_right = (order / 2).max(4);
    let anchor = -p.s;
    if anchor - LEFT_DROP * tau < -crate::airy::AIRY_RANGE {
        return Err(Error::TruncationTooTight(format!(
            "Fermi window reaches {} below the supported Airy range",
            anchor - LEFT_DROP * tau
        )));
    }
    let left = map_rule(
        &gauss_legendre(n_left)?,
        DomainMap::ExponentialHalfLine {
            a: anchor,
            scale: LEFT_SCALE * tau,
            upward: false,
        },
    )?
    .retain(|x| x >= anchor - LEFT_DROP * tau);
    let right = map_rule(
        &gauss_legendre(n_right)?,
        DomainMap::AlgebraicHalfLine {
            a: anchor,
            scale: p.s.max(5.0),
        },
    )?
    .retain(|x| x <= RIGHT_DROP);
    Ok(left.join(
        right,
        Domain::Composite {
            a: f64::NEG_INFINITY,
            b: f64::INFINITY,
        },
    ))
}

/// Nodes on (-s, inf) for the finite-temperature representation.
pub fn finite_temperature_nodes(p: Params, order: usize) -> Result<QuadratureRule> {
    let cutoff = FT_DROP_TAU * p.tau() + FT_DROP_CONST;
    Ok(map_rule(
        &gauss_legendre(order)?,
        DomainMap::AlgebraicHalfLine {
            a: -p.s,
            scale: p.s.max(5.0),
        },
    )?
    .retain(|u| u <= cutoff))
}

/// Nodes on (x, max(x,0) + 12) for the Tracy-Widom determinant.
pub fn tracy_widom_nodes(x: f64, order: usize) -> Result<QuadratureRule> {
    map_rule(
        &gauss_legendre(order)?,
        DomainMap::Affine {
            a: x,
            b: x.max(0.0) + TW_WINDOW,
        },
    )
}

fn airy_at_nodes(nodes: &[f64]) -> Result<Vec<AiryPair>> {
    nodes.par_iter().map(|&x| airy_or_zero(x)).collect()
}

/// M_ij = c_i K^Ai(x_i, x_j) c_j.
fn scaled_airy_matrix<R: Real>(nodes: &[f64], scale: &[f64]) -> Result<SymmetricMatrix<R>> {
    let pairs = airy_at_nodes(nodes)?;
    let n = nodes.len();
    let rows: Vec<Vec<R>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..=i)
                .map(|j| {
                    let k = kernel_from_pairs(nodes[i], pairs[i], nodes[j], pairs[j])?;
                    Ok(R::from_f64(scale[i]) * R::from_f64(k) * R::from_f64(scale[j]))
                })
                .collect::<Result<Vec<R>>>()
        })
        .collect::<Result<_>>()?;
    Ok(SymmetricMatrix::from_packed(n, rows.concat())?.with_data_roundoff(f64::EPSILON / 2.0))
}

fn sigma_weighted_matrix<R: Real>(p: Params, order: usize) -> Result<SymmetricMatrix<R>> {
    let rule = sigma_weighted_nodes(p, order)?;
    let t13 = p.t13();
    let scale: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| (w * fermi(t13 * (x + p.s))).sqrt())
        .collect();
    scaled_airy_matrix(&rule.nodes, &scale)
}

fn finite_temperature_matrix<R: Real>(p: Params, order: usize) -> Result<SymmetricMatrix<R>> {
    let rule = finite_temperature_nodes(p, order)?;
    let n = rule.len();
    let u_min = rule.nodes.first().copied().unwrap_or(-p.s).min(-p.s);
    let r_rule = temperature_rule(p, u_min)?;
    let r_weights = fermi_weighted(&r_rule, p);
    // B_ik = sqrt(w_i) Ai(u_i + r_k) sqrt(omega_k sigma_k); M = B B^T is PSD
    // by construction.
    let kept: Vec<(f64, f64)> = r_rule
        .nodes
        .iter()
        .zip(&r_weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&r, &w)| (r, w.sqrt()))
        .collect();
    let b: Vec<Vec<f64>> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&u, &w)| {
            let sw = w.sqrt();
            kept.iter()
                .map(|&(r, sr)| Ok(sw * airy_or_zero(u + r)?.ai * sr))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<R>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| dot::<R>(&b[i], &b[j])).collect())
        .collect();
    Ok(SymmetricMatrix::from_packed(n, rows.concat())?.with_data_roundoff(f64::EPSILON / 2.0))
}

/// Dot product accumulated in precision R.
trait Dot: Sized {
    fn dot(a: &[f64], b: &[f64]) -> Self;
}

impl Dot for f64 {
    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

impl Dot for DoubleDouble {
    fn dot(a: &[f64], b: &[f64]) -> DoubleDouble {
        let mut acc = DoubleDouble::ZERO;
        for (&x, &y) in a.iter().zip(b) {
            acc += DoubleDouble::from_product(x, y);
        }
        acc
    }
}

fn dot<R: Real>(a: &[f64], b: &[f64]) -> R {
    // Dispatch through the two concrete precisions.
    if R::UNIT_ROUNDOFF < 1e-20 {
        let d = <DoubleDouble as Dot>::dot(a, b);
        R::from_f64(d.hi) + R::from_f64(d.lo)
    } else {
        R::from_f64(<f64 as Dot>::dot(a, b))
    }
}

fn assemble<R: Real>(p: Params, rep: KernelRep, order: usize) -> Result<SymmetricMatrix<R>> {
    match rep {
        KernelRep::SigmaWeighted => sigma_weighted_matrix(p, order),
        KernelRep::FiniteTemperature => finite_temperature_matrix(p, order),
    }
}

/// The assembled Nystrom matrix in standard precision.
pub fn nystrom_matrix(p: Params, rep: KernelRep, order: usize) -> Result<SymmetricMatrix<f64>> {
    check_order(order)?;
    assemble(p, rep, order)
}

fn log_det_with<R: Real>(m: SymmetricMatrix<R>) -> Result<f64> {
    log_det_one_minus(&m).map(|v| v.min(0.0))
}

/// log det(1 - K) at a single order, without the order-halving estimate.
pub fn log_q_value(p: Params, rep: KernelRep, order: usize, precision: Precision) -> Result<f64> {
    check_order(order)?;
    log_q_unchecked(p, rep, order, precision)
}

fn log_q_unchecked(p: Params, rep: KernelRep, order: usize, precision: Precision) -> Result<f64> {
    match precision {
        Precision::Standard => log_det_with(assemble::<f64>(p, rep, order)?),
        Precision::Extended => log_det_with(assemble::<DoubleDouble>(p, rep, order)?),
    }
}

/// log Q(s,T) with error estimate |value(order) - value(order/2)|.
pub fn log_q(
    p: Params,
    rep: KernelRep,
    order: usize,
    precision: Precision,
) -> Result<FredholmResult> {
    check_order(order)?;
    let full = log_q_value(p, rep, order, precision)?;
    let half = log_q_unchecked(p, rep, order / 2, precision);
    let error_estimate = match half {
        Ok(h) => (full - h).abs(),
        Err(Error::SpectrumOutOfRange { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(FredholmResult {
        log_det: full,
        order,
        rep,
        error_estimate,
        precision,
    })
}

/// log F_TW(x) = log det(1 - K^Ai) on (x, inf).
pub fn tracy_widom_log_cdf(x: f64, order: usize, precision: Precision) -> Result<f64> {
    check_order(order)?;
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("x must be finite, got {x}")));
    }
    let rule = tracy_widom_nodes(x, order)?;
    let scale: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    match precision {
        Precision::Standard => log_det_with(scaled_airy_matrix::<f64>(&rule.nodes, &scale)?),
        Precision::Extended => {
            log_det_with(scaled_airy_matrix::<DoubleDouble>(&rule.nodes, &scale)?)
        }
    }
}

/// Default finite-difference step max(1e-3, 1e-2 sqrt|s|).
pub fn default_step(s: f64) -> f64 {
    (1e-2 * s.abs().sqrt()).max(1e-3)
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidInput(format!("step must be > 0, got {h}")));
    }
    Ok(())
}

/// Central difference of log Q in s.
pub fn dlog_q_ds(
    p: Params,
    h: f64,
    rep: KernelRep,
    order: usize,
    precision: Precision,
) -> Result<f64> {
    check_step(h)?;
    let plus = log_q_value(Params::new(p.s + h, p.t)?, rep, order, precision)?;
    let minus = log_q_value(Params::new(p.s - h, p.t)?, rep, order, precision)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Central difference of log Q in T.
pub fn dlog_q_dt(
    p: Params,
    h: f64,
    rep: KernelRep,
    order: usize,
    precision: Precision,
) -> Result<f64> {
    check_step(h)?;
    if h >= p.t {
        return Err(Error::InvalidInput(format!(
            "step {h} must be smaller than T = {}",
            p.t
        )));
    }
    let plus = log_q_value(Params::new(p.s, p.t + h)?, rep, order, precision)?;
    let minus = log_q_value(Params::new(p.s, p.t - h)?, rep, order, precision)?;
    Ok((plus - minus) / (2.0 * h))
}

/// log Q at each order (strictly ascending), each with its own estimate.
pub fn convergence_scan(
    p: Params,
    rep: KernelRep,
    orders: &[usize],
    precision: Precision,
) -> Result<Vec<ScanRow>> {
    if orders.is_empty() {
        return Err(Error::InvalidInput("at least one order is required".into()));
    }
    if orders.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "orders must be strictly ascending".into(),
        ));
    }
    orders
        .iter()
        .map(|&order| {
            let r = log_q(p, rep, order, precision)?;
            Ok(ScanRow {
                order,
                log_det: r.log_det,
                error_estimate: r.error_estimate,
            })
        })
        .collect()
}
