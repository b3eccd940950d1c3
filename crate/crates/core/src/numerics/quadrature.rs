//! Gauss-Legendre rules, domain maps, composite panels, and adaptive
//! Gauss-Kronrod (7/15) integration.

use crate::error::{Error, Result};

/// Where a rule's nodes live after mapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Finite interval [a, b].
    Interval { a: f64, b: f64 },
    /// (a, +inf) or (-inf, a) depending on `upward`.
    HalfLine { anchor: f64, upward: bool },
    /// A half-line cut to the finite window [a, a + width].
    Truncated { a: f64, width: f64 },
    /// Several panels covering [a, b].
    Composite { a: f64, b: f64 },
}

/// Descriptor for [`map_rule`]. All maps take the reference interval [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainMap {
    /// t -> a + (b - a)(t + 1)/2
    Affine { a: f64, b: f64 },
    /// t -> a + L (1 + t)/(1 - t), onto (a, +inf)
    AlgebraicHalfLine { a: f64, scale: f64 },
    /// t -> a + L ln(2/(1 - t)) onto (a, +inf) when `upward`, mirrored onto
    /// (-inf, a) otherwise. Suited to integrands decaying like exp(-x/L).
    ExponentialHalfLine { a: f64, scale: f64, upward: bool },
    /// Half-line (a, +inf) cut to [a, a + W], affinely.
    Truncation { a: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Keep only nodes satisfying `keep`; the domain tag is unchanged.
    pub fn retain<F: Fn(f64) -> bool>(mut self, keep: F) -> Self {
        let (nodes, weights): (Vec<f64>, Vec<f64>) = self
            .nodes
            .iter()
            .zip(&self.weights)
            .filter(|(&x, _)| keep(x))
            .map(|(&x, &w)| (x, w))
            .unzip();
        self.nodes = nodes;
        self.weights = weights;
        self
    }

    /// Concatenate two rules on adjacent domains.
    pub fn join(mut self, other: QuadratureRule, domain: Domain) -> Self {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
        self.domain = domain;
        self
    }
}

/// Legendre polynomial P_n and its derivative at x, by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "Gauss-Legendre order must be >= 1".into(),
        ));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi-type initial guess for the i-th largest root.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::Interval { a: -1.0, b: 1.0 },
    })
}

/// Push a rule on [-1, 1] through a domain map; weights absorb the Jacobian.
pub fn map_rule(rule: &QuadratureRule, map: DomainMap) -> Result<QuadratureRule> {
    let n = rule.len();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let domain = match map {
        DomainMap::Affine { a, b } => {
            if !(b > a) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "degenerate affine map [{a}, {b}]"
                )));
            }
            let half = 0.5 * (b - a);
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(a + half * (t + 1.0));
                weights.push(half * w);
            }
            Domain::Interval { a, b }
        }
        DomainMap::AlgebraicHalfLine { a, scale } => {
            if !(scale > 0.0) || !a.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "degenerate half-line scale {scale}"
                )));
            }
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let om = 1.0 - t;
                nodes.push(a + scale * (1.0 + t) / om);
                weights.push(w * 2.0 * scale / (om * om));
            }
            Domain::HalfLine {
                anchor: a,
                upward: true,
            }
        }
        DomainMap::ExponentialHalfLine { a, scale, upward } => {
            if !(scale > 0.0) || !a.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "degenerate half-line scale {scale}"
                )));
            }
            let dir = if upward { 1.0 } else { -1.0 };
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let om = 1.0 - t;
                nodes.push(a + dir * scale * (2.0 / om).ln());
                weights.push(w * scale / om);
            }
            if !upward {
                nodes.reverse();
                weights.reverse();
            }
            Domain::HalfLine { anchor: a, upward }
        }
        DomainMap::Truncation { a, width } => {
            if !(width > 0.0) || !a.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "degenerate truncation width {width}"
                )));
            }
            let half = 0.5 * width;
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(a + half * (t + 1.0));
                weights.push(half * w);
            }
            Domain::Truncated { a, width }
        }
    };
    Ok(QuadratureRule {
        nodes,
        weights,
        domain,
    })
}

/// Composite Gauss-Legendre rule with `per_panel` nodes on each
/// [breaks[k], breaks[k+1]]; breaks must be strictly increasing.
pub fn composite_gauss_legendre(breaks: &[f64], per_panel: usize) -> Result<QuadratureRule> {
    if breaks.len() < 2 {
        return Err(Error::InvalidInput(
            "composite rule needs at least two breakpoints".into(),
        ));
    }
    let base = gauss_legendre(per_panel)?;
    let mut nodes = Vec::with_capacity((breaks.len() - 1) * per_panel);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let panel = map_rule(
            &base,
            DomainMap::Affine {
                a: pair[0],
                b: pair[1],
            },
        )?;
        nodes.extend(panel.nodes);
        weights.extend(panel.weights);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::Composite {
            a: breaks[0],
            b: *breaks.last().unwrap(),
        },
    })
}

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive G7/K15 integration over [a, b] with optional interior
/// breakpoints (ignored if outside the interval).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "integration limits must be finite: [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut points: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&p| p > lo && p < hi)
        .collect();
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    points.dedup();
    let mut edges = vec![lo];
    edges.extend(points);
    edges.push(hi);

    // (a, b, value, error)
    let mut panels: Vec<(f64, f64, f64, f64)> = edges
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let value: f64 = panels.iter().map(|p| p.2).sum();
        let error: f64 = panels.iter().map(|p| p.3).sum();
        if !value.is_finite() {
            return Err(Error::QuadratureFailure(
                "non-finite integrand value".into(),
            ));
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Integral {
                value: sign * value,
                error,
            });
        }
        if panels.len() >= tol.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "subdivision limit {} reached with error estimate {error:e}",
                tol.max_intervals
            )));
        }
        let (k, worst) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .map(|(k, p)| (k, *p))
            .unwrap();
        let mid = 0.5 * (worst.0 + worst.1);
        if !(mid > worst.0 && mid < worst.1) {
            return Err(Error::QuadratureFailure(format!(
                "interval collapsed near {mid} with error estimate {error:e}"
            )));
        }
        let (v1, e1) = gk15(&f, worst.0, mid);
        let (v2, e2) = gk15(&f, mid, worst.1);
        panels[k] = (worst.0, mid, v1, e1);
        panels.push((mid, worst.1, v2, e2));
    }
}

/// Adaptive integral over [a, +inf) via x = a + t/(1 - t).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Integral> {
    let g = |t: f64| {
        let om = 1.0 - t;
        let x = a + t / om;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (om * om)
        }
    };
    integrate(g, 0.0, 1.0, &[], tol)
}
