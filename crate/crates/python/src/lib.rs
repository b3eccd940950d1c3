//! Python bindings. Numerical failures raise `kpztail.NumericalError`; bad
//! arguments raise `ValueError`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use kpztail::airy;
use kpztail::asymptotics;
use kpztail::equilibrium;
use kpztail::fredholm;
use kpztail::kernels::{KernelRep, Params};
use kpztail::numerics::Precision;
use kpztail::Error;

create_exception!(kpztail, NumericalError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::DomainError(_) => PyValueError::new_err(e.to_string()),
        _ => NumericalError::new_err(format!("{}: {e}", e.name())),
    }
}

fn params(s: f64, t: f64) -> PyResult<Params> {
    Params::new(s, t).map_err(to_py)
}

fn parse_rep(rep: &str) -> PyResult<KernelRep> {
    match rep {
        "sigma" => Ok(KernelRep::SigmaWeighted),
        "finite-t" => Ok(KernelRep::FiniteTemperature),
        other => Err(PyValueError::new_err(format!(
            "rep must be 'sigma' or 'finite-t', got '{other}'"
        ))),
    }
}

fn parse_precision(precision: &str) -> PyResult<Precision> {
    match precision {
        "standard" => Ok(Precision::Standard),
        "extended" => Ok(Precision::Extended),
        other => Err(PyValueError::new_err(format!(
            "precision must be 'standard' or 'extended', got '{other}'"
        ))),
    }
}

#[pyclass(frozen, name = "FredholmResult")]
struct PyFredholmResult {
    #[pyo3(get)]
    log_det: f64,
    #[pyo3(get)]
    order: usize,
    #[pyo3(get)]
    rep: &'static str,
    #[pyo3(get)]
    error_estimate: f64,
    #[pyo3(get)]
    precision: &'static str,
}

#[pymethods]
impl PyFredholmResult {
    fn __repr__(&self) -> String {
        format!(
            "FredholmResult(log_det={}, order={}, rep='{}', error_estimate={:e}, precision='{}')",
            self.log_det, self.order, self.rep, self.error_estimate, self.precision
        )
    }
}

#[pyclass(frozen, name = "AsymptoticBreakdown")]
struct PyBreakdown {
    #[pyo3(get)]
    terms: Vec<(&'static str, f64)>,
    #[pyo3(get)]
    total: f64,
}

#[pymethods]
impl PyBreakdown {
    fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }

    fn __repr__(&self) -> String {
        format!(
            "AsymptoticBreakdown(terms={:?}, total={})",
            self.terms, self.total
        )
    }
}

impl From<asymptotics::AsymptoticBreakdown> for PyBreakdown {
    fn from(b: asymptotics::AsymptoticBreakdown) -> Self {
        Self {
            terms: b.terms,
            total: b.total,
        }
    }
}

#[pyclass(frozen, name = "TailBracket")]
struct PyTailBracket {
    #[pyo3(get)]
    lower_a: f64,
    #[pyo3(get)]
    upper_b: f64,
    #[pyo3(get)]
    s_tilde: f64,
    #[pyo3(get)]
    epsilon: f64,
}

/// Solved endpoint problem; psi, w and the g combination are methods.
#[pyclass(frozen, name = "Equilibrium")]
struct PyEquilibrium {
    inner: equilibrium::EquilibriumData,
}

#[pymethods]
impl PyEquilibrium {
    #[new]
    #[pyo3(signature = (s, t, tol = 1e-14))]
    fn new(s: f64, t: f64, tol: f64) -> PyResult<Self> {
        let inner = equilibrium::solve_lambda0(params(s, t)?, tol).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn lambda0(&self) -> f64 {
        self.inner.lambda0
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    fn psi(&self, lam: f64) -> PyResult<f64> {
        equilibrium::psi(lam, &self.inner).map_err(to_py)
    }

    fn w(&self, lam: f64) -> PyResult<f64> {
        equilibrium::w_at(lam, &self.inner).map_err(to_py)
    }

    fn g_combination(&self, lam: f64) -> PyResult<f64> {
        equilibrium::g_combination(lam, &self.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Equilibrium(s={}, T={}, lambda0={})",
            self.inner.p.s, self.inner.p.t, self.inner.lambda0
        )
    }
}

/// Ai(x) and Ai'(x).
#[pyfunction]
fn airy_ai(x: f64) -> PyResult<(f64, f64)> {
    let p = airy::airy_eval(x).map_err(to_py)?;
    Ok((p.ai, p.ai_prime))
}

#[pyfunction]
fn airy_kernel(u: f64, v: f64) -> PyResult<f64> {
    airy::airy_kernel(u, v).map_err(to_py)
}

/// log Q(s,T) from the Fredholm determinant.
#[pyfunction]
#[pyo3(signature = (s, t, order = 80, rep = "sigma", precision = "standard"))]
fn log_q(
    py: Python<'_>,
    s: f64,
    t: f64,
    order: usize,
    rep: &str,
    precision: &str,
) -> PyResult<PyFredholmResult> {
    let p = params(s, t)?;
    let rep = parse_rep(rep)?;
    let precision = parse_precision(precision)?;
    let r = py
        .detach(|| fredholm::log_q(p, rep, order, precision))
        .map_err(to_py)?;
    Ok(PyFredholmResult {
        log_det: r.log_det,
        order: r.order,
        rep: r.rep.as_str(),
        error_estimate: r.error_estimate,
        precision: r.precision.as_str(),
    })
}

/// log F_TW(x).
#[pyfunction]
#[pyo3(signature = (x, order = 80, precision = "standard"))]
fn tracy_widom_log_cdf(py: Python<'_>, x: f64, order: usize, precision: &str) -> PyResult<f64> {
    let precision = parse_precision(precision)?;
    py.detach(|| fredholm::tracy_widom_log_cdf(x, order, precision))
        .map_err(to_py)
}

#[pyfunction]
fn rate_phi(y: f64) -> PyResult<f64> {
    asymptotics::rate_phi(y).map_err(to_py)
}

#[pyfunction]
fn log_q_asymptotic(s: f64, t: f64) -> PyResult<PyBreakdown> {
    asymptotics::log_q_asymptotic(params(s, t)?)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn log_q_expansion_fixed_t(s: f64, t: f64) -> PyResult<PyBreakdown> {
    asymptotics::log_q_expansion_fixed_t(params(s, t)?)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn tw_tail_expansion(s: f64) -> PyResult<PyBreakdown> {
    asymptotics::tw_tail_expansion(s)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn naive_estimate(s: f64, t: f64) -> PyResult<f64> {
    asymptotics::naive_estimate(params(s, t)?).map_err(to_py)
}

#[pyfunction]
fn dlogq_ds_asymptotic(s: f64, t: f64) -> PyResult<PyBreakdown> {
    asymptotics::dlogq_ds_asymptotic(params(s, t)?)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn dlogq_dt_asymptotic(s: f64, t: f64) -> PyResult<PyBreakdown> {
    asymptotics::dlogq_dt_asymptotic(params(s, t)?)
        .map(Into::into)
        .map_err(to_py)
}

/// Tail bracket with q_eval either "asymptotic" or "numeric".
#[pyfunction]
#[pyo3(signature = (s, t, epsilon = 0.1, q_eval = "asymptotic", order = 80, rep = "sigma"))]
fn kpz_tail_bracket(
    py: Python<'_>,
    s: f64,
    t: f64,
    epsilon: f64,
    q_eval: &str,
    order: usize,
    rep: &str,
) -> PyResult<PyTailBracket> {
    let p = params(s, t)?;
    let rep = parse_rep(rep)?;
    let b = match q_eval {
        "asymptotic" => asymptotics::kpz_tail_bracket(p, epsilon, |p| {
            asymptotics::log_q_asymptotic(p).map(|b| b.total)
        }),
        "numeric" => py.detach(|| {
            asymptotics::kpz_tail_bracket(p, epsilon, |p| {
                fredholm::log_q_value(p, rep, order, Precision::Standard)
            })
        }),
        other => {
            return Err(PyValueError::new_err(format!(
                "q_eval must be 'asymptotic' or 'numeric', got '{other}'"
            )))
        }
    }
    .map_err(to_py)?;
    Ok(PyTailBracket {
        lower_a: b.lower_a,
        upper_b: b.upper_b,
        s_tilde: b.s_tilde,
        epsilon: b.epsilon,
    })
}

#[pymodule(name = "kpztail")]
fn kpztail_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyFredholmResult>()?;
    m.add_class::<PyBreakdown>()?;
    m.add_class::<PyTailBracket>()?;
    m.add_class::<PyEquilibrium>()?;
    m.add_function(wrap_pyfunction!(airy_ai, m)?)?;
    m.add_function(wrap_pyfunction!(airy_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(log_q, m)?)?;
    m.add_function(wrap_pyfunction!(tracy_widom_log_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(rate_phi, m)?)?;
    m.add_function(wrap_pyfunction!(log_q_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(log_q_expansion_fixed_t, m)?)?;
    m.add_function(wrap_pyfunction!(tw_tail_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(naive_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(dlogq_ds_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(dlogq_dt_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(kpz_tail_bracket, m)?)?;
    Ok(())
}
