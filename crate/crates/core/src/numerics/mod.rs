//! Scalar precision modes, quadrature, and log det(I - M) for symmetric M.

pub mod dd;
pub mod eigen;
pub mod quadrature;
pub mod real;

pub use dd::DoubleDouble;
pub use quadrature::{
    composite_gauss_legendre, gauss_legendre, integrate, integrate_to_infinity, map_rule, Domain,
    DomainMap, Integral, QuadratureRule, Tolerance,
};
pub use real::Real;

use crate::error::{Error, Result};

/// Working precision for matrix assembly and the eigensolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Precision {
    /// IEEE double, unit roundoff 2^-53.
    #[default]
    Standard,
    /// Double-double, unit roundoff 2^-104.
    Extended,
}

impl Precision {
    pub fn unit_roundoff(self) -> f64 {
        match self {
            Precision::Standard => <f64 as Real>::UNIT_ROUNDOFF,
            Precision::Extended => <DoubleDouble as Real>::UNIT_ROUNDOFF,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Standard => "standard",
            Precision::Extended => "extended",
        }
    }
}

/// Dense symmetric matrix stored as its packed lower triangle, so
/// `get(i, j) == get(j, i)` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<R: Real = f64> {
    order: usize,
    packed: Vec<R>,
    data_roundoff: f64,
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl<R: Real> SymmetricMatrix<R> {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            packed: vec![R::zero(); order * (order + 1) / 2],
            data_roundoff: R::UNIT_ROUNDOFF,
        }
    }

    /// Build from `f(i, j)` evaluated on the lower triangle (i >= j) only.
    pub fn from_fn<F: FnMut(usize, usize) -> R>(order: usize, mut f: F) -> Self {
        let mut packed = Vec::with_capacity(order * (order + 1) / 2);
        for i in 0..order {
            for j in 0..=i {
                packed.push(f(i, j));
            }
        }
        Self {
            order,
            packed,
            data_roundoff: R::UNIT_ROUNDOFF,
        }
    }

    /// Build from a packed lower triangle, row by row.
    pub fn from_packed(order: usize, packed: Vec<R>) -> Result<Self> {
        if packed.len() != order * (order + 1) / 2 {
            return Err(Error::InvalidInput(format!(
                "packed storage of length {} does not match order {order}",
                packed.len()
            )));
        }
        Ok(Self {
            order,
            packed,
            data_roundoff: R::UNIT_ROUNDOFF,
        })
    }

    /// Record that the entries were computed with a coarser roundoff than
    /// the storage type (e.g. f64 kernel values held in double-double).
    pub fn with_data_roundoff(mut self, roundoff: f64) -> Self {
        self.data_roundoff = roundoff.max(R::UNIT_ROUNDOFF);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> R {
        self.packed[packed_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: R) {
        self.packed[packed_index(i, j)] = value;
    }

    pub fn to_dense(&self) -> Vec<R> {
        let n = self.order;
        let mut out = vec![R::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    pub fn eigenvalues(&self) -> Result<Vec<R>> {
        eigen::symmetric_eigenvalues(self.to_dense(), self.order)
    }

    /// Spectrum guard width: 8 x unit roundoff x order. The upper guard uses
    /// the working precision; the lower one uses the data roundoff, since
    /// rounding in the entries alone can push eigenvalues of a PSD operator
    /// slightly below zero.
    pub fn guard_tolerances(&self) -> (f64, f64) {
        let n = self.order.max(1) as f64;
        (8.0 * self.data_roundoff * n, 8.0 * R::UNIT_ROUNDOFF * n)
    }
}

/// Eigen-decomposition of `m` with the spectrum check applied.
pub fn guarded_spectrum<R: Real>(m: &SymmetricMatrix<R>) -> Result<Vec<R>> {
    let ev = m.eigenvalues()?;
    let (lower_tol, upper_tol) = m.guard_tolerances();
    let lower = -lower_tol;
    let upper = 1.0 - upper_tol;
    for &mu in &ev {
        let v = mu.to_f64();
        if !v.is_finite() || v < lower || mu >= R::one() - R::from_f64(upper_tol) {
            return Err(Error::SpectrumOutOfRange {
                eigenvalue: v,
                lower,
                upper,
                order: m.order(),
            });
        }
    }
    Ok(ev)
}

/// log det(I - M) = sum ln(1 - mu_i) over the eigenvalues of M.
pub fn log_det_one_minus<R: Real>(m: &SymmetricMatrix<R>) -> Result<f64> {
    let ev = guarded_spectrum(m)?;
    let mut acc = R::zero();
    for mu in ev {
        acc += (-mu).ln_1p();
    }
    Ok(acc.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix() {
        for n in [1, 3, 17] {
            assert_eq!(
                log_det_one_minus(&SymmetricMatrix::<f64>::zeros(n)).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn one_by_one_half() {
        let m = SymmetricMatrix::from_fn(1, |_, _| 0.5);
        assert!((log_det_one_minus(&m).unwrap() - 0.5f64.ln()).abs() < 1e-16);
    }

    #[test]
    fn diagonal_both_precisions() {
        let m = SymmetricMatrix::from_fn(2, |i, j| if i == j { 0.1 * (i + 1) as f64 } else { 0.0 });
        let exact = 0.9f64.ln() + 0.8f64.ln();
        assert!((log_det_one_minus(&m).unwrap() - exact).abs() < 1e-15);
        let md = SymmetricMatrix::from_fn(2, |i, j| {
            DoubleDouble::from(if i == j { 0.1 * (i + 1) as f64 } else { 0.0 })
        });
        assert!((log_det_one_minus(&md).unwrap() - exact).abs() < 1e-15);
    }

    #[test]
    fn storage_is_symmetric() {
        let mut m = SymmetricMatrix::<f64>::zeros(4);
        m.set(3, 1, 2.5);
        assert_eq!(m.get(1, 3), 2.5);
        assert_eq!(m.get(3, 1), 2.5);
    }

    #[test]
    fn guard_rejects_unit_and_negative_eigenvalues() {
        let m = SymmetricMatrix::from_fn(1, |_, _| 1.0);
        assert!(matches!(
            log_det_one_minus(&m),
            Err(Error::SpectrumOutOfRange { .. })
        ));
        let m = SymmetricMatrix::from_fn(2, |i, j| if i == j { -0.01 } else { 0.0 });
        assert!(matches!(
            log_det_one_minus(&m),
            Err(Error::SpectrumOutOfRange { .. })
        ));
        // within roundoff of zero is accepted
        let m = SymmetricMatrix::from_fn(2, |i, j| if i == j { -1e-17 } else { 0.0 });
        assert!(log_det_one_minus(&m).is_ok());
    }

    #[test]
    fn extended_resolves_eigenvalue_near_one() {
        // mu = 1 - 1e-20 is representable only in double-double.
        let mu = DoubleDouble::ONE - DoubleDouble::from(1e-20);
        let m = SymmetricMatrix::from_fn(1, |_, _| mu);
        let v = log_det_one_minus(&m).unwrap();
        assert!((v - (1e-20f64).ln()).abs() < 1e-10);
    }

    #[test]
    fn packed_length_checked() {
        assert!(SymmetricMatrix::<f64>::from_packed(3, vec![0.0; 5]).is_err());
        assert!(SymmetricMatrix::<f64>::from_packed(3, vec![0.0; 6]).is_ok());
    }
}
