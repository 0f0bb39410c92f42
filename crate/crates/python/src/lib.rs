//! Python bindings: `import kexchange`.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use kexchange_core::baselines::{self, BaselineResult};
use kexchange_core::exact::{
    brute_force_opt as core_brute_force, check_lemma3_and_theorem1, DEFAULT_BRUTE_CAP,
};
use kexchange_core::generate::{generate_linear_packing, generate_packing};
use kexchange_core::io::{load_instance, parse_instance, serialize_instance};
use kexchange_core::objective::{certify_monotone_submodular, DEFAULT_CERTIFY_CAP};
use kexchange_core::rational::parse_rational;
use kexchange_core::search::{self, AcceptanceRule, Caps, SearchConfig};
use kexchange_core::{fixtures, Error, Rational};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Invariant(_) | Error::Audit(_) | Error::Overflow => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((*r.numer(), *r.denom()))
}

fn epsilon(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(to_py)
}

/// A ground set with an independence system and an objective.
#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: kexchange_core::Instance,
}

#[pymethods]
impl PyInstance {
    /// Reads a `.kx` file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        load_instance(&path)
            .map(|inner| PyInstance { inner })
            .map_err(to_py)
    }

    /// Parses `.kx` text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_instance(text)
            .map(|inner| PyInstance { inner })
            .map_err(to_py)
    }

    /// The bundled two-bases instance.
    #[staticmethod]
    fn two_bases() -> Self {
        PyInstance {
            inner: fixtures::two_bases(),
        }
    }

    /// Random k-set packing with a coverage objective.
    #[staticmethod]
    #[pyo3(signature = (n, k, universe_size, density=0.3, seed=0))]
    fn generate(
        n: usize,
        k: usize,
        universe_size: usize,
        density: f64,
        seed: u64,
    ) -> PyResult<Self> {
        generate_packing(n, k, universe_size, density, seed)
            .map(|inner| PyInstance { inner })
            .map_err(to_py)
    }

    /// Random k-set packing with a linear objective.
    #[staticmethod]
    #[pyo3(signature = (n, k, universe_size, unit=false, seed=0))]
    fn generate_linear(
        n: usize,
        k: usize,
        universe_size: usize,
        unit: bool,
        seed: u64,
    ) -> PyResult<Self> {
        generate_linear_packing(n, k, universe_size, unit, seed)
            .map(|inner| PyInstance { inner })
            .map_err(to_py)
    }

    fn to_kx(&self) -> PyResult<String> {
        serialize_instance(&self.inner).map_err(to_py)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(name={:?}, n={}, k={})",
            self.inner.name,
            self.inner.n(),
            self.inner.k()
        )
    }
}

impl PyInstance {
    fn labels_of(&self, set: &[usize]) -> Vec<String> {
        set.iter()
            .map(|&e| self.inner.label(e).to_string())
            .collect()
    }
}

fn baseline_dict<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    r: &BaselineResult,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("solution", inst.labels_of(&r.solution))?;
    d.set_item("value", fraction(py, &r.value.get())?)?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("terminated", r.terminated)?;
    d.set_item("cycle_period", r.cycle_period)?;
    d.set_item("oracle_calls", r.oracle_calls)?;
    let trajectory: Vec<Vec<String>> = r.trajectory.iter().map(|s| inst.labels_of(s)).collect();
    d.set_item("trajectory", trajectory)?;
    Ok(d)
}

/// Non-oblivious local search. Returns a dict with the solution labels,
/// its value as a Fraction, and run statistics.
#[pyfunction]
#[pyo3(signature = (instance, epsilon="1/2", literal=false))]
fn run<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    epsilon: &str,
    literal: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let mut config = SearchConfig::new(self::epsilon(epsilon)?);
    if literal {
        config.rule = AcceptanceRule::WholeSolution;
    }
    let (state, trace) = search::run(&instance.inner, &config).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("solution", instance.labels_of(&state.set))?;
    d.set_item("value", fraction(py, &state.value.get())?)?;
    d.set_item("improvements", trace.improvement_count())?;
    d.set_item("oracle_calls", trace.oracle_calls)?;
    d.set_item("alpha", fraction(py, &trace.alpha)?)?;
    d.set_item("delta", fraction(py, &trace.delta)?)?;
    d.set_item("potential", state.potential)?;
    Ok(d)
}

#[pyfunction]
fn greedy<'py>(py: Python<'py>, instance: &PyInstance) -> PyResult<Bound<'py, PyDict>> {
    let r = baselines::greedy(&instance.inner).map_err(to_py)?;
    baseline_dict(py, instance, &r)
}

#[pyfunction]
#[pyo3(signature = (instance, epsilon="1/2"))]
fn oblivious<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    epsilon: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let r = baselines::oblivious_ls(&instance.inner, &self::epsilon(epsilon)?, &Caps::default())
        .map_err(to_py)?;
    baseline_dict(py, instance, &r)
}

#[pyfunction]
#[pyo3(signature = (instance, epsilon="1/2"))]
fn linear_nols<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    epsilon: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let r = baselines::linear_nols(&instance.inner, &self::epsilon(epsilon)?, &Caps::default())
        .map_err(to_py)?;
    baseline_dict(py, instance, &r)
}

/// The marginal-weight variant; `start` is a list of labels.
#[pyfunction]
#[pyo3(signature = (instance, max_iters=100, start=None))]
fn naive<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    max_iters: usize,
    start: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyDict>> {
    let start = match start {
        None => None,
        Some(labels) => Some(
            labels
                .iter()
                .map(|l| {
                    instance
                        .inner
                        .index_of(l)
                        .ok_or_else(|| PyValueError::new_err(format!("unknown element {l:?}")))
                })
                .collect::<PyResult<Vec<usize>>>()?,
        ),
    };
    let r = baselines::naive_marginal_nols(
        &instance.inner,
        start.as_deref(),
        max_iters,
        &Caps::default(),
    )
    .map_err(to_py)?;
    baseline_dict(py, instance, &r)
}

/// Optimal independent set as `(labels, value)`.
#[pyfunction]
#[pyo3(signature = (instance, cap=DEFAULT_BRUTE_CAP))]
fn brute_force<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    cap: usize,
) -> PyResult<(Vec<String>, Bound<'py, PyAny>)> {
    let (o, v) = core_brute_force(&instance.inner, cap).map_err(to_py)?;
    Ok((instance.labels_of(&o), fraction(py, &v.get())?))
}

/// Runs the search and audits its output; returns the verdict, ratio,
/// bound and every checked inequality as `(name, subject, lhs, rhs, holds)`.
#[pyfunction]
#[pyo3(signature = (instance, epsilon="1/2", cap=DEFAULT_BRUTE_CAP))]
fn audit<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    epsilon: &str,
    cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let eps = self::epsilon(epsilon)?;
    let (state, trace) = search::run(&instance.inner, &SearchConfig::new(eps)).map_err(to_py)?;
    let report =
        check_lemma3_and_theorem1(&instance.inner, &state, &trace, &eps, &Caps::default(), cap)
            .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("passed", report.passed())?;
    d.set_item("ratio", report.ratio.map(|r| fraction(py, &r)).transpose()?)?;
    d.set_item("bound", fraction(py, &report.bound)?)?;
    let checks = report
        .checks
        .iter()
        .map(|c| {
            Ok((
                c.name,
                c.subject.clone(),
                fraction(py, &c.lhs)?,
                fraction(py, &c.rhs)?,
                c.holds,
            ))
        })
        .collect::<PyResult<Vec<_>>>()?;
    d.set_item("checks", checks)?;
    Ok(d)
}

/// Exhaustive monotone-submodular certification.
#[pyfunction]
#[pyo3(signature = (instance, max_n=DEFAULT_CERTIFY_CAP))]
fn certify(instance: &PyInstance, max_n: usize) -> PyResult<bool> {
    certify_monotone_submodular(&instance.inner.objective, max_n)
        .map(|c| c.passed())
        .map_err(to_py)
}

#[pymodule]
fn kexchange(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(greedy, m)?)?;
    m.add_function(wrap_pyfunction!(oblivious, m)?)?;
    m.add_function(wrap_pyfunction!(linear_nols, m)?)?;
    m.add_function(wrap_pyfunction!(naive, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    Ok(())
}
