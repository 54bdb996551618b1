//! Python bindings. Matrices cross the boundary as nested lists of
//! `complex`; reports cross as JSON strings or plain values.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use unifeas::oracle::{self, SampleMode, SearchBudget};
use unifeas::{CMat2, CPolicy, C64};

type PyMat = [[C64; 2]; 2];

fn err(e: unifeas::Error) -> PyErr {
    match e {
        unifeas::Error::InfeasibleInstance(_) | unifeas::Error::NotFound { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report types serialize")
}

#[pyclass(name = "Instance", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyInstance(unifeas::ProblemInstance);

#[pymethods]
impl PyInstance {
    #[new]
    fn new(rho1: PyMat, rho2: PyMat, tau1: PyMat, tau2: PyMat) -> PyResult<Self> {
        unifeas::ProblemInstance::from_cmats(CMat2(rho1), CMat2(rho2), CMat2(tau1), CMat2(tau2))
            .map(PyInstance)
            .map_err(err)
    }

    #[getter]
    fn rho1(&self) -> PyMat {
        self.0.rho1.as_cmat().0
    }

    #[getter]
    fn rho2(&self) -> PyMat {
        self.0.rho2.as_cmat().0
    }

    #[getter]
    fn tau1(&self) -> PyMat {
        self.0.tau1.as_cmat().0
    }

    #[getter]
    fn tau2(&self) -> PyMat {
        self.0.tau2.as_cmat().0
    }

    fn decide_unital(&self) -> PyDecision {
        PyDecision(unifeas::decide_unital(&self.0))
    }

    fn decide_alberti_uhlmann(&self) -> PyDecision {
        PyDecision(unifeas::decide_alberti_uhlmann(&self.0))
    }

    /// `(a2, a1, a0)` of `det(τ₁ + tτ₂) − det(ρ₁ + tρ₂)`.
    fn parabola(&self) -> (f64, f64, f64) {
        let p = unifeas::parabola_coeffs(&self.0);
        (p.a2, p.a1, p.a0)
    }

    #[pyo3(signature = (policy = "midpoint"))]
    fn synthesize(&self, policy: &str) -> PyResult<PyChannel> {
        let policy = match policy {
            "midpoint" => CPolicy::Midpoint,
            "zero" => CPolicy::ZeroIfContained,
            "min" => CPolicy::Min,
            "max" => CPolicy::Max,
            other => return Err(PyValueError::new_err(format!("unknown policy {other:?}"))),
        };
        unifeas::synthesize(&self.0, policy).map(PyChannel).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Instance({:?})", self.0)
    }
}

#[pyclass(name = "Decision", frozen)]
struct PyDecision(unifeas::Decision);

#[pymethods]
impl PyDecision {
    #[getter]
    fn feasible(&self) -> bool {
        self.0.is_feasible()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    #[getter]
    fn margins(&self) -> Vec<(String, f64)> {
        self.0.margins.iter().map(|m| (m.name.clone(), m.slack)).collect()
    }

    fn to_json(&self) -> String {
        to_json(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Decision({})", to_json(&self.0))
    }
}

#[pyclass(name = "Channel", frozen)]
struct PyChannel(unifeas::Channel);

#[pymethods]
impl PyChannel {
    #[new]
    fn new(kraus: Vec<PyMat>) -> Self {
        PyChannel(unifeas::Channel::new(
            kraus.into_iter().map(CMat2).collect(),
            unifeas::Provenance::User,
        ))
    }

    #[getter]
    fn kraus(&self) -> Vec<PyMat> {
        self.0.kraus.iter().map(|k| k.0).collect()
    }

    fn apply(&self, m: PyMat) -> PyMat {
        self.0.apply(&CMat2(m)).0
    }

    fn choi(&self) -> Vec<Vec<C64>> {
        let c = self.0.choi();
        (0..4).map(|i| (0..4).map(|j| c[(i, j)]).collect()).collect()
    }

    fn tp_residual(&self) -> f64 {
        self.0.tp_residual()
    }

    fn unital_residual(&self) -> f64 {
        self.0.unital_residual()
    }

    /// Verification report as JSON.
    #[pyo3(signature = (instance, tol = unifeas::synth::TOL_VERIFY))]
    fn verify(&self, instance: &PyInstance, tol: f64) -> String {
        to_json(&unifeas::verify_channel(&self.0, &instance.0, tol))
    }
}

#[pyfunction]
fn example_family(c: f64) -> PyResult<PyInstance> {
    unifeas::example_family(c).map(PyInstance).map_err(err)
}

#[pyfunction]
fn example_map(p: f64, kappa: f64) -> PyResult<PyChannel> {
    unifeas::example_map(p, kappa).map(PyChannel).map_err(err)
}

#[pyfunction]
fn example1_channel() -> PyChannel {
    PyChannel(unifeas::example1_channel())
}

#[pyfunction]
#[pyo3(signature = (seed, mode = "any"))]
fn random_instance(seed: u64, mode: &str) -> PyResult<PyInstance> {
    let mode = match mode {
        "any" => SampleMode::Any,
        "feasible" => SampleMode::Feasible,
        "infeasible" => SampleMode::Infeasible,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    unifeas::random_instance(seed, mode).map(PyInstance).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (a, b, c))]
fn pauli_channel(a: f64, b: f64, c: f64) -> PyResult<PyChannel> {
    unifeas::pauli_channel(a, b, c).map(PyChannel).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (instance, budget = SearchBudget::default().iterations, seed = 0))]
fn random_channel_search(instance: &PyInstance, budget: usize, seed: u64) -> PyResult<(PyChannel, f64)> {
    let hit = unifeas::random_channel_search(&instance.0, SearchBudget { iterations: budget, seed, ..Default::default() })
        .map_err(err)?;
    Ok((PyChannel(hit.channel), hit.residual))
}

/// `(holds, beta, gamma, margin)` on an `N × N` grid over `[−R, R]²`.
#[pyfunction]
#[pyo3(signature = (instance, count = 201, bound = 20.0))]
fn grid_condition_iv(instance: &PyInstance, count: usize, bound: f64) -> PyResult<(bool, f64, f64, f64)> {
    let grid = unifeas::GridSpec::new(count, bound).map_err(err)?;
    let out = unifeas::grid_condition_iv(&instance.0, &grid);
    Ok((out.holds, out.worst[0], out.worst[1], out.worst_margin))
}

#[pyfunction]
#[pyo3(signature = (tol = 1e-12))]
fn family_threshold(tol: f64) -> f64 {
    oracle::family_threshold(tol)
}

#[pymodule]
fn unifeas_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyDecision>()?;
    m.add_class::<PyChannel>()?;
    m.add_function(wrap_pyfunction!(example_family, m)?)?;
    m.add_function(wrap_pyfunction!(example_map, m)?)?;
    m.add_function(wrap_pyfunction!(example1_channel, m)?)?;
    m.add_function(wrap_pyfunction!(random_instance, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_channel, m)?)?;
    m.add_function(wrap_pyfunction!(random_channel_search, m)?)?;
    m.add_function(wrap_pyfunction!(grid_condition_iv, m)?)?;
    m.add_function(wrap_pyfunction!(family_threshold, m)?)?;
    Ok(())
}
