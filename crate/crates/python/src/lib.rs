use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mixdisc_core as core;
use mixdisc_core::experiment::{self, Suite};
use mixdisc_core::io::{self, Metadata};
use mixdisc_core::{Error, Matrix, SolverConfig, SymMatrix};

create_exception!(mixdisc, MixdiscError, PyException);
create_exception!(mixdisc, ParseError, MixdiscError);
create_exception!(mixdisc, NoConvergenceError, MixdiscError);
create_exception!(mixdisc, PropertyViolation, MixdiscError);
create_exception!(mixdisc, NotPositiveDefiniteError, MixdiscError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Parse(_) => ParseError::new_err(msg),
        Error::NoConvergence { best } => {
            NoConvergenceError::new_err((msg, PyScalingResult::from(*best)))
        }
        Error::PropertyViolated(_) | Error::HypothesisViolated { .. } => PropertyViolation::new_err(msg),
        Error::NotPositiveDefinite { .. } | Error::TupleNotPositiveDefinite { .. } => {
            NotPositiveDefiniteError::new_err(msg)
        }
        Error::InvalidArgument(_) | Error::DimensionMismatch(_) | Error::UnknownSuite(_) => {
            PyValueError::new_err(msg)
        }
        _ => MixdiscError::new_err(msg),
    }
}

fn solver_config(tol: f64, max_iter: usize) -> PyResult<SolverConfig> {
    let cfg = SolverConfig {
        trace_tol: tol,
        max_iterations: max_iter,
        ..SolverConfig::default()
    };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn matrix_from_rows(rows: Vec<Vec<f64>>) -> PyResult<Matrix> {
    Matrix::from_rows(&rows).map_err(to_py)
}

/// An n-tuple of symmetric n x n matrices.
#[pyclass(name = "MatrixTuple", module = "mixdisc", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMatrixTuple {
    inner: core::MatrixTuple,
}

#[pymethods]
impl PyMatrixTuple {
    /// Builds a tuple from nested lists; asymmetric input is averaged.
    #[new]
    fn new(matrices: Vec<Vec<Vec<f64>>>) -> PyResult<Self> {
        let ms = matrices
            .iter()
            .map(|m| SymMatrix::from_rows(m))
            .collect::<core::Result<Vec<_>>>()
            .map_err(to_py)?;
        Ok(Self {
            inner: core::MatrixTuple::new(ms).map_err(to_py)?,
        })
    }

    /// Seeded random tuple whose eigenvalues all lie in `[1, alpha]`.
    #[staticmethod]
    #[pyo3(signature = (n, alpha, seed=0))]
    fn random(n: usize, alpha: f64, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: core::random_tuple(n, alpha, seed).map_err(to_py)?,
        })
    }

    /// Diagonal embedding of the rows of a square matrix.
    #[staticmethod]
    fn from_matrix_rows(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: core::from_matrix_rows(&matrix_from_rows(rows)?).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: io::load_tuple(path).map_err(to_py)?.tuple,
        })
    }

    #[pyo3(signature = (path, description=None))]
    fn save(&self, path: PathBuf, description: Option<String>) -> PyResult<()> {
        let meta = Metadata {
            description,
            ..Metadata::default()
        };
        io::save_tuple(path, &self.inner, meta).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn matrices(&self) -> Vec<Vec<Vec<f64>>> {
        self.inner.iter().map(SymMatrix::to_rows).collect()
    }

    fn traces(&self) -> Vec<f64> {
        self.inner.traces()
    }

    /// Conditioning number: largest eigenvalue over smallest across the tuple.
    fn alpha(&self) -> PyResult<f64> {
        Ok(core::alpha_of(&self.inner).map_err(to_py)?.alpha)
    }

    #[pyo3(signature = (tol=1e-9))]
    fn is_doubly_stochastic(&self, tol: f64) -> PyResult<bool> {
        Ok(core::check_doubly_stochastic(&self.inner, tol).map_err(to_py)?.passes)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("MatrixTuple(n={})", self.inner.n())
    }
}

#[pyclass(name = "ExactValue", module = "mixdisc", frozen)]
struct PyExactValue {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    log_abs: f64,
    #[pyo3(get)]
    sign: i8,
    #[pyo3(get)]
    overflow_warning: bool,
}

#[pymethods]
impl PyExactValue {
    fn __repr__(&self) -> String {
        format!(
            "ExactValue(value={:e}, log_abs={}, sign={})",
            self.value, self.log_abs, self.sign
        )
    }
}

#[pyclass(name = "ScalingResult", module = "mixdisc", frozen)]
struct PyScalingResult {
    #[pyo3(get)]
    xi: Vec<f64>,
    #[pyo3(get)]
    tau: Vec<f64>,
    #[pyo3(get)]
    log_det_transform: f64,
    #[pyo3(get)]
    residual: f64,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    objective: f64,
    #[pyo3(get)]
    objective_trace: Vec<f64>,
    transform: Matrix,
    scaled: core::MatrixTuple,
}

impl From<core::ScalingResult> for PyScalingResult {
    fn from(r: core::ScalingResult) -> Self {
        Self {
            xi: r.xi,
            tau: r.tau,
            log_det_transform: r.log_det_transform,
            residual: r.residual,
            iterations: r.iterations,
            objective: r.objective,
            objective_trace: r.objective_trace,
            transform: r.transform,
            scaled: r.scaled,
        }
    }
}

#[pymethods]
impl PyScalingResult {
    #[getter]
    fn transform(&self) -> Vec<Vec<f64>> {
        self.transform.to_rows()
    }

    #[getter]
    fn scaled(&self) -> PyMatrixTuple {
        PyMatrixTuple {
            inner: self.scaled.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "ScalingResult(iterations={}, residual={:e})",
            self.iterations, self.residual
        )
    }
}

#[pyclass(name = "DiscriminantEstimate", module = "mixdisc", frozen)]
struct PyEstimate {
    inner: core::DiscriminantEstimate,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    residual: f64,
}

#[pymethods]
impl PyEstimate {
    #[getter]
    fn log_lower(&self) -> f64 {
        self.inner.log_lower
    }
    #[getter]
    fn log_upper(&self) -> f64 {
        self.inner.log_upper
    }
    #[getter]
    fn log_correction(&self) -> f64 {
        self.inner.log_correction
    }
    #[getter]
    fn alpha_input(&self) -> f64 {
        self.inner.alpha_input
    }
    #[getter]
    fn alpha_scaled(&self) -> f64 {
        self.inner.alpha_scaled
    }
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    fn width(&self) -> f64 {
        self.inner.width()
    }

    #[pyo3(signature = (log_value, slack=1e-8))]
    fn contains(&self, log_value: f64, slack: f64) -> bool {
        self.inner.contains(log_value, slack)
    }

    fn __repr__(&self) -> String {
        format!(
            "DiscriminantEstimate(log_lower={}, log_upper={})",
            self.inner.log_lower, self.inner.log_upper
        )
    }
}

#[pyfunction]
fn mixed_discriminant(py: Python<'_>, t: PyRef<'_, PyMatrixTuple>) -> PyResult<PyExactValue> {
    let inner = t.inner.clone();
    let v = py.detach(move || core::mixed_discriminant(&inner)).map_err(to_py)?;
    Ok(PyExactValue {
        value: v.value,
        log_abs: v.log_abs,
        sign: v.sign,
        overflow_warning: v.overflow_warning,
    })
}

/// Permanent by Ryser's formula (`naive=True` for the permutation sum).
#[pyfunction]
#[pyo3(signature = (rows, naive=false))]
fn permanent(rows: Vec<Vec<f64>>, naive: bool) -> PyResult<f64> {
    let a = matrix_from_rows(rows)?;
    if naive {
        core::permanent_naive(&a)
    } else {
        core::permanent_ryser(&a)
    }
    .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (t, tol=1e-10, max_iter=500))]
fn scale(py: Python<'_>, t: PyRef<'_, PyMatrixTuple>, tol: f64, max_iter: usize) -> PyResult<PyScalingResult> {
    let cfg = solver_config(tol, max_iter)?;
    let inner = t.inner.clone();
    let r = py
        .detach(move || core::scale_to_doubly_stochastic(&inner, &cfg))
        .map_err(to_py)?;
    Ok(r.into())
}

#[pyfunction]
#[pyo3(signature = (t, tol=1e-10, max_iter=500))]
fn estimate(py: Python<'_>, t: PyRef<'_, PyMatrixTuple>, tol: f64, max_iter: usize) -> PyResult<PyEstimate> {
    let cfg = solver_config(tol, max_iter)?;
    let inner = t.inner.clone();
    let (est, scaling) = py
        .detach(move || core::estimate_with_scaling(&inner, &cfg))
        .map_err(to_py)?;
    Ok(PyEstimate {
        inner: est,
        iterations: scaling.iterations,
        residual: scaling.residual,
    })
}

#[pyfunction]
fn objective_f(t: PyRef<'_, PyMatrixTuple>, x: Vec<f64>) -> PyResult<f64> {
    core::objective_f(&t.inner, &x).map_err(to_py)
}

#[pyfunction]
fn gradient_f(t: PyRef<'_, PyMatrixTuple>, x: Vec<f64>) -> PyResult<Vec<f64>> {
    core::gradient_f(&t.inner, &x).map_err(to_py)
}

/// `ln(n!/n^n)`.
#[pyfunction]
fn bapat_lower(n: usize) -> f64 {
    core::bapat_lower(n)
}

/// `min(0, alpha^4 ln n - (n - 1))`.
#[pyfunction]
fn conditioned_upper(n: usize, alpha: f64) -> f64 {
    core::conditioned_upper(n, alpha)
}

/// Runs an experiment suite and returns its rows as dicts.
#[pyfunction]
#[pyo3(signature = (suite, reps, seed=0, threads=None))]
fn run_experiment<'py>(
    py: Python<'py>,
    suite: &str,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let suite: Suite = suite.parse().map_err(to_py)?;
    let threads = threads.unwrap_or_else(experiment::threads_from_env);
    let records = py
        .detach(move || experiment::run_suite(suite, reps, seed, threads))
        .map_err(to_py)?;
    records
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("suite", r.suite)?;
            d.set_item("index", r.index)?;
            d.set_item("seed", r.seed)?;
            d.set_item("n", r.n)?;
            d.set_item("alpha_input", r.alpha_input)?;
            d.set_item("alpha_scaled", r.alpha_scaled)?;
            d.set_item("log_exact", r.log_exact)?;
            d.set_item("log_lower", r.log_lower)?;
            d.set_item("log_upper", r.log_upper)?;
            d.set_item("iterations", r.iterations)?;
            d.set_item("residual", r.residual)?;
            d.set_item("wall_time_ms", r.wall_time_ms)?;
            d.set_item("pass", r.pass)?;
            d.set_item("note", r.note)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn mixdisc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyMatrixTuple>()?;
    m.add_class::<PyExactValue>()?;
    m.add_class::<PyScalingResult>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(mixed_discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(permanent, m)?)?;
    m.add_function(wrap_pyfunction!(scale, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(objective_f, m)?)?;
    m.add_function(wrap_pyfunction!(gradient_f, m)?)?;
    m.add_function(wrap_pyfunction!(bapat_lower, m)?)?;
    m.add_function(wrap_pyfunction!(conditioned_upper, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("MixdiscError", py.get_type::<MixdiscError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("NoConvergenceError", py.get_type::<NoConvergenceError>())?;
    m.add("PropertyViolation", py.get_type::<PropertyViolation>())?;
    m.add("NotPositiveDefiniteError", py.get_type::<NotPositiveDefiniteError>())?;
    Ok(())
}
