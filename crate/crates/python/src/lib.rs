//! Python bindings. Structured results come back as plain dicts and lists.

use mmwave_regime::cli::{regime_rows, roc_rows};
use mmwave_regime::config::{load_config, parse_config, RunConfig};
use mmwave_regime::detector::{self, FitMode, MeFit, NoiseConfig};
use mmwave_regime::mcsim::{self, Blocking};
use mmwave_regime::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;
use std::path::PathBuf;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Config { .. } | Error::Domain(_) | Error::Io(_) | Error::InfeasibleFit { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_bound_py_any(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn parse_fit_mode(mode: &str) -> PyResult<FitMode> {
    match mode {
        "paper_equation" => Ok(FitMode::PaperEquation),
        "closed_form" => Ok(FitMode::ClosedForm),
        other => Err(PyValueError::new_err(format!(
            "fit mode must be 'paper_equation' or 'closed_form', got {other:?}"
        ))),
    }
}

/// Validated run configuration.
#[pyclass(name = "Config", frozen, module = "mmwave_regime_py")]
struct PyConfig {
    inner: RunConfig,
}

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        load_config(&path).map(|inner| Self { inner }).map_err(to_py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_config(text).map(|inner| Self { inner }).map_err(to_py_err)
    }

    #[getter]
    fn sha256(&self) -> &str {
        &self.inner.sha256
    }

    #[getter]
    fn defaulted(&self) -> Vec<String> {
        self.inner.defaulted.clone()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn trials(&self) -> u64 {
        self.inner.trials
    }

    #[getter]
    fn beta_th(&self) -> f64 {
        self.inner.beta_th
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.inner.system.noise.phi
    }

    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.system.noise.sigma2
    }

    /// Copy with the receiver moved to distance `v0` from the center.
    fn with_v0(&self, v0: f64) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        inner.system = inner.system.with_v0(v0);
        inner.system.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    fn with_rho(&self, rho: f64) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        inner.system.blockage.rho = rho;
        inner.system.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    fn with_n_interferers(&self, n: u64) -> Self {
        let mut inner = self.inner.clone();
        inner.system.channel.n_interferers = n;
        Self { inner }
    }

    /// The fully resolved configuration.
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner.system;
        format!(
            "Config(radius={}, v0={}, rho={}, n_interferers={}, sha256={}...)",
            s.geometry.radius,
            s.geometry.v0_norm,
            s.blockage.rho,
            s.channel.n_interferers,
            &self.inner.sha256[..12]
        )
    }
}

fn resolve_p_b(cfg: &RunConfig, p_b: Option<f64>) -> PyResult<f64> {
    match p_b {
        Some(p) => Ok(p),
        None => cfg.system.blockage_result().map(|r| r.p_b).map_err(to_py_err),
    }
}

#[pyfunction]
fn blockage<'py>(py: Python<'py>, config: &PyConfig) -> PyResult<Bound<'py, PyAny>> {
    let r = config.inner.system.blockage_result().map_err(to_py_err)?;
    to_py(py, &r)
}

/// E[y] at the configured receiver; `p_b` defaults to the blockage model.
#[pyfunction]
#[pyo3(signature = (config, p_b=None))]
fn mean_received_power(config: &PyConfig, p_b: Option<f64>) -> PyResult<f64> {
    let cfg = &config.inner;
    let p_b = resolve_p_b(cfg, p_b)?;
    let model = cfg.system.interference_model().map_err(to_py_err)?;
    model.mean_received_power(cfg.system.noise.phi, p_b).map_err(to_py_err)
}

/// M_Y(s), `s` in 1/W.
#[pyfunction]
#[pyo3(signature = (config, s, p_b=None))]
fn aggregate_mgf(config: &PyConfig, s: f64, p_b: Option<f64>) -> PyResult<f64> {
    let cfg = &config.inner;
    let p_b = resolve_p_b(cfg, p_b)?;
    let model = cfg.system.interference_model().map_err(to_py_err)?;
    model
        .aggregate_mgf(s, cfg.system.noise.phi, p_b, &cfg.system.series)
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (mean_y, phi, mode="paper_equation"))]
fn fit_me_lambda(mean_y: f64, phi: f64, mode: &str) -> PyResult<f64> {
    detector::fit_me_lambda(mean_y, phi, parse_fit_mode(mode)?)
        .map(|f| f.lambda)
        .map_err(to_py_err)
}

#[pyfunction]
fn h0_cdf(y: f64, sigma2: f64, phi: f64) -> f64 {
    detector::h0_cdf(y, &NoiseConfig { sigma2, phi })
}

#[pyfunction]
fn np_threshold(beta: f64, sigma2: f64, phi: f64) -> PyResult<f64> {
    detector::np_threshold(beta, &NoiseConfig { sigma2, phi }).map_err(to_py_err)
}

#[pyfunction]
fn detection_probability(lam: f64, eta_prime: f64, phi: f64) -> f64 {
    let fit = MeFit {
        lambda: lam,
        mode: FitMode::ClosedForm,
        mean_used: phi + 1.0 / lam,
    };
    detector::detection_probability(&fit, eta_prime, phi)
}

/// Detector outcome at the configured receiver and significance level.
#[pyfunction]
fn detect<'py>(py: Python<'py>, config: &PyConfig) -> PyResult<Bound<'py, PyAny>> {
    let cfg = &config.inner;
    let sys = &cfg.system;
    let p_b = resolve_p_b(cfg, None)?;
    let mean_y = sys
        .interference_model()
        .and_then(|m| m.mean_received_power(sys.noise.phi, p_b))
        .map_err(to_py_err)?;
    let fit = detector::fit_me_lambda(mean_y, sys.noise.phi, sys.fit_mode).map_err(to_py_err)?;
    let det = detector::detect(&fit, &sys.noise, cfg.beta_th).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("p_b", p_b)?;
    out.set_item("mean_y", mean_y)?;
    out.set_item("lambda", fit.lambda)?;
    out.set_item("detection", to_py(py, &det)?)?;
    Ok(out.into_any())
}

/// Rows over the sweep grids, as the `regime-map` command emits them.
#[pyfunction]
fn regime_map<'py>(py: Python<'py>, config: &PyConfig) -> PyResult<Bound<'py, PyAny>> {
    let rows = py.detach(|| regime_rows(&config.inner));
    to_py(py, &rows)
}

#[pyfunction]
fn roc<'py>(py: Python<'py>, config: &PyConfig) -> PyResult<Bound<'py, PyAny>> {
    let rows = py.detach(|| roc_rows(&config.inner)).map_err(to_py_err)?;
    to_py(py, &rows)
}

/// Received-power samples; `blocking` is "analytic" or "geometric".
#[pyfunction]
#[pyo3(signature = (config, trials=None, seed=None, blocking="analytic"))]
fn simulate(
    py: Python<'_>,
    config: &PyConfig,
    trials: Option<u64>,
    seed: Option<u64>,
    blocking: &str,
) -> PyResult<Vec<f64>> {
    let cfg = &config.inner;
    let blocking = match blocking {
        "analytic" => Blocking::Bernoulli(resolve_p_b(cfg, None)?),
        "geometric" => Blocking::Geometric,
        other => {
            return Err(PyValueError::new_err(format!(
                "blocking must be 'analytic' or 'geometric', got {other:?}"
            )))
        }
    };
    let (trials, seed) = (trials.unwrap_or(cfg.trials), seed.unwrap_or(cfg.seed));
    py.detach(|| mcsim::simulate_received_power(&cfg.system, blocking, trials, seed))
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (config, trials=None, seed=None))]
fn validate<'py>(
    py: Python<'py>,
    config: &PyConfig,
    trials: Option<u64>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = &config.inner;
    let (trials, seed) = (trials.unwrap_or(cfg.trials), seed.unwrap_or(cfg.seed));
    let report = py
        .detach(|| mcsim::validate_suite(&cfg.system, cfg.beta_th, trials, seed))
        .map_err(to_py_err)?;
    to_py(py, &report)
}

#[pymodule]
fn mmwave_regime_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_function(wrap_pyfunction!(blockage, m)?)?;
    m.add_function(wrap_pyfunction!(mean_received_power, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_mgf, m)?)?;
    m.add_function(wrap_pyfunction!(fit_me_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(h0_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(np_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(detection_probability, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(regime_map, m)?)?;
    m.add_function(wrap_pyfunction!(roc, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
