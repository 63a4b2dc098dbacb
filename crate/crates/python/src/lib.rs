//! Python bindings for `shocklab`.
//!
//! Summaries cross the boundary as JSON and arrive in Python as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use shocklab::burgers;
use shocklab::config::{describe_schema, parse_config, Command, ConfigError, RunConfig};
use shocklab::experiment::{run_experiment, ExperimentError};
use shocklab::nullcond::{self, MetricKind, NullError};
use shocklab::Profile1D;

create_exception!(shocklab_py, ShocklabError, PyException, "A numerical or quadrature failure.");

fn experiment_err(e: ExperimentError) -> PyErr {
    let code = e.exit_code();
    let msg = format!("{e} (exit code {code})");
    if code == 2 {
        PyValueError::new_err(msg)
    } else {
        ShocklabError::new_err(msg)
    }
}

fn config_err(e: ConfigError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn null_err(e: NullError) -> PyErr {
    experiment_err(ExperimentError::Null(e))
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Parsed experiment configuration: one command section plus `[run]` options.
#[pyclass(name = "Config")]
struct PyConfig {
    inner: RunConfig,
}

#[pymethods]
impl PyConfig {
    /// Parse configuration text.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_config(text).map_err(config_err)? })
    }

    /// Defaults for a command section such as `"john.solve"`.
    #[staticmethod]
    fn defaults(section: &str) -> PyResult<Self> {
        let cmd = Command::from_section(section)
            .ok_or_else(|| PyValueError::new_err(format!("unknown section [{section}]")))?;
        Ok(Self { inner: RunConfig::with_defaults(cmd) })
    }

    #[getter]
    fn section(&self) -> &'static str {
        self.inner.command.section()
    }

    /// Set a key from its textual form, as it would appear in a file.
    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        self.inner.set(key, value).map_err(config_err)
    }

    fn has(&self, key: &str) -> bool {
        self.inner.has(key)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Run the experiment and return its summary as a dict.
    fn run<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let summary = run_experiment(&self.inner).map_err(experiment_err)?;
        json_to_py(py, &summary.to_json())
    }

    /// Run and write any configured JSON/CSV outputs; returns the summary.
    fn run_and_write<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let summary = run_experiment(&self.inner).map_err(experiment_err)?;
        summary.write_outputs(&self.inner).map_err(experiment_err)?;
        json_to_py(py, &summary.to_json())
    }

    fn __repr__(&self) -> String {
        format!("Config({:?})", self.inner.to_text())
    }
}

/// One-dimensional profile such as `"gaussian:1,0,1"` or `"expr:r*exp(-r^2)"`.
#[pyclass(name = "Profile")]
struct PyProfile {
    inner: Profile1D,
}

#[pymethods]
impl PyProfile {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let inner = Profile1D::parse(spec).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn value(&self, x: f64) -> f64 {
        self.inner.value(x)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.inner.derivative(x)
    }

    fn scaled(&self, factor: f64) -> Self {
        Self { inner: self.inner.scaled(factor) }
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    #[getter]
    fn support_radius(&self) -> f64 {
        self.inner.support_radius()
    }

    /// Burgers blow-up time `-1/min F'`, or None when the profile never steepens.
    fn burgers_blowup_time(&self) -> Option<f64> {
        burgers::blowup_time(&self.inner)
    }

    /// Burgers solution at `(t, x)` before blow-up.
    fn burgers_value(&self, t: f64, x: f64) -> PyResult<f64> {
        burgers::evaluate(&self.inner, t, x).map_err(|e| experiment_err(e.into()))
    }

    fn __repr__(&self) -> String {
        format!("Profile({:?})", self.inner.label())
    }
}

/// Built-in metric family for the failure factors.
#[pyclass(name = "MetricFamily")]
struct PyMetricFamily {
    inner: nullcond::MetricFamily,
    spec: String,
}

#[pymethods]
impl PyMetricFamily {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let inner = nullcond::MetricFamily::builtin(spec).map_err(null_err)?;
        Ok(Self { inner, spec: spec.to_string() })
    }

    #[staticmethod]
    fn builtin_names() -> Vec<&'static str> {
        nullcond::MetricFamily::builtin_names().to_vec()
    }

    #[getter]
    fn is_system(&self) -> bool {
        self.inner.kind() == MetricKind::SystemGdPhi
    }

    fn aleph_plus(&self, theta: [f64; 3]) -> f64 {
        nullcond::aleph_plus(&self.inner, theta)
    }

    fn aleph_minus(&self, theta: [f64; 3]) -> f64 {
        nullcond::aleph_minus(&self.inner, theta)
    }

    /// Classic null condition test of the induced quadratic nonlinearity.
    #[pyo3(signature = (n_dirs = 4096))]
    fn satisfies_null_condition(&self, n_dirs: usize) -> PyResult<bool> {
        let nl = nullcond::QuadraticNonlinearity::induced_by(&self.inner);
        Ok(nullcond::check_classic_null(&nl, n_dirs).map_err(null_err)?.passes)
    }

    fn __repr__(&self) -> String {
        format!("MetricFamily({:?})", self.spec)
    }
}

/// Fluid Lagrangian `ℒ(σ)` with background wave number `k`.
#[pyclass(name = "FluidLagrangian")]
struct PyFluidLagrangian {
    inner: nullcond::FluidLagrangian,
}

#[pymethods]
impl PyFluidLagrangian {
    #[new]
    #[pyo3(signature = (spec, k, finite_differences = false))]
    fn new(spec: &str, k: f64, finite_differences: bool) -> PyResult<Self> {
        let mut inner = nullcond::FluidLagrangian::parse(spec, k).map_err(null_err)?;
        if finite_differences {
            inner = inner.with_finite_differences();
        }
        Ok(Self { inner })
    }

    fn value(&self, sigma: f64) -> f64 {
        self.inner.value(sigma)
    }

    fn derived<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let d = nullcond::fluid_derived(&self.inner).map_err(null_err)?;
        let text = serde_json::to_string(&d).map_err(|e| ShocklabError::new_err(e.to_string()))?;
        json_to_py(py, &text)
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_exceptional(&self, tol: f64) -> PyResult<bool> {
        nullcond::is_exceptional(&self.inner, tol).map_err(null_err)
    }
}

/// Parse configuration text, run it and return the summary dict.
#[pyfunction]
fn run<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    PyConfig::new(text)?.run(py)
}

/// Human-readable listing of every section and key.
#[pyfunction]
fn schema() -> String {
    describe_schema()
}

#[pymodule]
fn shocklab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PyMetricFamily>()?;
    m.add_class::<PyFluidLagrangian>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(schema, m)?)?;
    m.add("ShocklabError", m.py().get_type::<ShocklabError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
