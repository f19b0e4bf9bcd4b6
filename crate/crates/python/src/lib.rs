//! Python bindings: kernels, GP posteriors, confidence bounds, policies,
//! test functions and the experiment harness.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use gpbandit::confidence::{self, BoundParams, ConcentrationParams};
use gpbandit::harness::checks;
use gpbandit::harness::experiment;
use gpbandit::harness::report;
use gpbandit::{kernels, noise, objectives, policies, Error};

fn to_py(err: Error) -> PyErr {
    if err.is_numerical() {
        PyArithmeticError::new_err(err.to_string())
    } else {
        PyValueError::new_err(err.to_string())
    }
}

/// Squared-exponential or half-integer Matérn kernel with unit variance.
#[pyclass(name = "Kernel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyKernel {
    inner: kernels::KernelSpec,
}

#[pymethods]
impl PyKernel {
    #[new]
    #[pyo3(signature = (family = "se", lengthscale = 0.2, nu = None))]
    fn new(family: &str, lengthscale: f64, nu: Option<f64>) -> PyResult<Self> {
        let inner = match family.to_ascii_lowercase().as_str() {
            "se" => kernels::KernelSpec::se(lengthscale),
            "matern" => kernels::KernelSpec::matern(nu.unwrap_or(2.5), lengthscale),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown kernel family {other:?}"
                )))
            }
        }
        .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn lengthscale(&self) -> f64 {
        self.inner.lengthscale()
    }

    fn __call__(&self, x: Vec<f64>, x2: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&x, &x2).map_err(to_py)
    }

    fn gram(&self, xs: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let n = xs.len();
        let flat = self.inner.gram(&xs).map_err(to_py)?;
        Ok(flat.chunks(n.max(1)).map(<[f64]>::to_vec).take(n).collect())
    }

    fn cross(&self, x: Vec<f64>, xs: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        self.inner.cross(&x, &xs).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Kernel({:?}, lengthscale={})",
            self.inner.family(),
            self.inner.lengthscale()
        )
    }
}

/// Immutable GP posterior; `update` returns a new posterior.
#[pyclass(name = "Posterior", frozen)]
struct PyPosterior {
    inner: gpbandit::Posterior,
}

#[pymethods]
impl PyPosterior {
    #[staticmethod]
    fn fit(kernel: &PyKernel, lam: f64, xs: Vec<Vec<f64>>, ys: Vec<f64>) -> PyResult<Self> {
        let inner = gpbandit::Posterior::fit(kernel.inner, lam, xs, ys).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn prior(kernel: &PyKernel, lam: f64) -> PyResult<Self> {
        let inner = gpbandit::Posterior::prior(kernel.inner, lam).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn update(&self, x: Vec<f64>, y: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.update(x, y).map_err(to_py)?,
        })
    }

    fn mean(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.mean(&x).map_err(to_py)
    }

    fn variance(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.variance(&x).map_err(to_py)
    }

    fn weights(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.weights(&x).map_err(to_py)?.0)
    }

    /// `(noise_free_sq, noise_sq)`
    fn variance_decomposition(&self, x: Vec<f64>) -> PyResult<(f64, f64)> {
        let d = self.inner.variance_decomposition(&x).map_err(to_py)?;
        Ok((d.noise_free_sq, d.noise_sq))
    }

    fn information_gain(&self) -> f64 {
        self.inner.information_gain()
    }

    #[getter]
    fn alpha(&self) -> Vec<f64> {
        self.inner.alpha().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn grid_of(points: Vec<Vec<f64>>) -> PyResult<policies::CandidateSet> {
    policies::CandidateSet::from_points(points).map_err(to_py)
}

#[pyfunction]
fn information_gain(kernel: &PyKernel, lam: f64, xs: Vec<Vec<f64>>) -> PyResult<f64> {
    gpbandit::gp::information_gain(kernel.inner, lam, &xs).map_err(to_py)
}

#[pyfunction]
fn beta_subgaussian(r: f64, lam: f64, delta: f64) -> PyResult<f64> {
    confidence::beta_subgaussian(r, lam, delta).map_err(to_py)
}

#[pyfunction]
fn beta_lighttail(xi0: f64, h0: f64, lam: f64, delta: f64) -> PyResult<f64> {
    confidence::beta_lighttail(xi0, h0, lam, delta).map_err(to_py)
}

/// `(lower, upper)` at `x`.
#[pyfunction]
fn conf_bounds(posterior: &PyPosterior, x: Vec<f64>, b: f64, beta: f64) -> PyResult<(f64, f64)> {
    let ci = confidence::conf_bounds(&posterior.inner, &x, b, beta).map_err(to_py)?;
    Ok((ci.lower, ci.upper))
}

/// MVR regret bound; pass `r` for sub-Gaussian noise or `xi0` and `h0`
/// for light-tailed noise.
#[pyfunction]
#[pyo3(signature = (n, gamma_n, b, delta, d, lam, r = None, xi0 = None, h0 = None, c = 1.0))]
#[allow(clippy::too_many_arguments)]
fn regret_bound(
    n: usize,
    gamma_n: f64,
    b: f64,
    delta: f64,
    d: usize,
    lam: f64,
    r: Option<f64>,
    xi0: Option<f64>,
    h0: Option<f64>,
    c: f64,
) -> PyResult<f64> {
    let conc = match (r, xi0, h0) {
        (Some(r), None, None) => ConcentrationParams::sub_gaussian(r),
        (None, Some(xi0), Some(h0)) => ConcentrationParams::light_tailed(xi0, h0),
        _ => return Err(PyValueError::new_err("give either r, or both xi0 and h0")),
    }
    .map_err(to_py)?;
    let params = BoundParams::with_c(b, delta, c, d).map_err(to_py)?;
    confidence::regret_bound(n, gamma_n, &params, &conc, lam).map_err(to_py)
}

/// `(h0, xi0)` for Laplace noise of scale `b`.
#[pyfunction]
fn laplace_lighttail_params(b: f64) -> PyResult<(f64, f64)> {
    noise::laplace_lighttail_params(b).map_err(to_py)
}

#[pyfunction]
fn hartman3(x: Vec<f64>) -> PyResult<f64> {
    objectives::hartman3(&x).map_err(to_py)
}

#[pyfunction]
fn rosenbrock2d(x: Vec<f64>) -> PyResult<f64> {
    objectives::rosenbrock2d(&x).map_err(to_py)
}

#[pyfunction]
fn mvr_select(posterior: &PyPosterior, grid: Vec<Vec<f64>>) -> PyResult<usize> {
    policies::mvr_select(&posterior.inner, &grid_of(grid)?).map_err(to_py)
}

#[pyfunction]
fn mvr_recommend(posterior: &PyPosterior, grid: Vec<Vec<f64>>) -> PyResult<usize> {
    policies::mvr_recommend(&posterior.inner, &grid_of(grid)?).map_err(to_py)
}

#[pyfunction]
fn ucb_select(posterior: &PyPosterior, grid: Vec<Vec<f64>>, beta_n: f64) -> PyResult<usize> {
    policies::ucb_select(&posterior.inner, &grid_of(grid)?, beta_n).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (posterior, grid, mu_plus, alpha = 0.01))]
fn pi_select(
    posterior: &PyPosterior,
    grid: Vec<Vec<f64>>,
    mu_plus: f64,
    alpha: f64,
) -> PyResult<usize> {
    policies::pi_select(&posterior.inner, &grid_of(grid)?, mu_plus, alpha).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (posterior, grid, mu_plus, alpha = 0.01))]
fn ei_select(
    posterior: &PyPosterior,
    grid: Vec<Vec<f64>>,
    mu_plus: f64,
    alpha: f64,
) -> PyResult<usize> {
    policies::ei_select(&posterior.inner, &grid_of(grid)?, mu_plus, alpha).map_err(to_py)
}

type Curves = std::collections::BTreeMap<String, Vec<(usize, f64, f64)>>;
type RecordTuple = (String, usize, usize, usize, f64, usize, f64);

/// Run an experiment from config text; returns records as tuples
/// `(algorithm, trial, n, selected_index, y_observed, recommendation_index, simple_regret)`.
#[pyfunction]
fn run_experiment(py: Python<'_>, config: &str) -> PyResult<Vec<RecordTuple>> {
    let cfg = gpbandit::ExperimentConfig::parse(config).map_err(to_py)?;
    let out = py
        .detach(|| experiment::run_experiment(&cfg))
        .map_err(to_py)?;
    Ok(out
        .records
        .into_iter()
        .map(|r| {
            (
                r.algorithm,
                r.trial,
                r.n,
                r.selected_index,
                r.y_observed,
                r.recommendation_index,
                r.simple_regret,
            )
        })
        .collect())
}

/// Mean simple regret per step: `{algorithm: [(n, mean, stderr), ...]}`.
#[pyfunction]
fn regret_curves(config: &str) -> PyResult<Curves> {
    let cfg = gpbandit::ExperimentConfig::parse(config).map_err(to_py)?;
    let out = experiment::run_experiment(&cfg).map_err(to_py)?;
    Ok(report::aggregate(&out.records)
        .into_iter()
        .map(|(k, v)| (k, v.into_iter().map(|p| (p.n, p.mean, p.stderr)).collect()))
        .collect())
}

/// `[(name, passed, measured, threshold), ...]`
#[pyfunction]
#[pyo3(signature = (fast = true))]
fn selfcheck(py: Python<'_>, fast: bool) -> Vec<(String, bool, f64, f64)> {
    py.detach(|| checks::selfcheck(fast))
        .into_iter()
        .map(|c| (c.name, c.passed, c.measured, c.threshold))
        .collect()
}

#[pymodule]
pub fn gpbandit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKernel>()?;
    m.add_class::<PyPosterior>()?;
    m.add_function(wrap_pyfunction!(information_gain, m)?)?;
    m.add_function(wrap_pyfunction!(beta_subgaussian, m)?)?;
    m.add_function(wrap_pyfunction!(beta_lighttail, m)?)?;
    m.add_function(wrap_pyfunction!(conf_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(regret_bound, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_lighttail_params, m)?)?;
    m.add_function(wrap_pyfunction!(hartman3, m)?)?;
    m.add_function(wrap_pyfunction!(rosenbrock2d, m)?)?;
    m.add_function(wrap_pyfunction!(mvr_select, m)?)?;
    m.add_function(wrap_pyfunction!(mvr_recommend, m)?)?;
    m.add_function(wrap_pyfunction!(ucb_select, m)?)?;
    m.add_function(wrap_pyfunction!(pi_select, m)?)?;
    m.add_function(wrap_pyfunction!(ei_select, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(regret_curves, m)?)?;
    m.add_function(wrap_pyfunction!(selfcheck, m)?)?;
    Ok(())
}
