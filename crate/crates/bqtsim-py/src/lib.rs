//! Python bindings for the bqtsim simulator.
//!
//! Exposes the protocol runner, branch enumeration, the noise-channel
//! fidelity curves, and the bit-flip code analysis. Build the cdylib and
//! import it as `bqtsim_py`; `python/smoke_test.py` at the repository root
//! shows the expected usage.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bqtsim::noise::{self, NoiseKind};
use bqtsim::protocol::{self, GhzLikeSpec};
use bqtsim::qec;
use bqtsim::{PureState as CorePureState, SimError, SimRng};

fn to_py_err(e: SimError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_kind(kind: &str) -> PyResult<NoiseKind> {
    kind.parse::<NoiseKind>().map_err(to_py_err)
}

fn spec(n: usize, coeffs: (Complex64, Complex64)) -> PyResult<GhzLikeSpec> {
    GhzLikeSpec::new(n, coeffs.0, coeffs.1).map_err(to_py_err)
}

/// A normalized state vector; qubit 0 is the most significant index bit.
#[pyclass(name = "PureState", skip_from_py_object)]
#[derive(Clone)]
struct PyPureState {
    inner: CorePureState,
}

#[pymethods]
impl PyPureState {
    #[new]
    fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: CorePureState::new(n_qubits, amplitudes).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    /// Phase-insensitive overlap |⟨self|other⟩|.
    fn overlap(&self, other: &PyPureState) -> PyResult<f64> {
        self.inner.overlap(&other.inner).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("PureState(n_qubits={})", self.inner.n_qubits())
    }
}

/// Record of one protocol run.
#[pyclass(name = "Transcript", skip_from_py_object)]
#[derive(Clone)]
struct PyTranscript {
    #[pyo3(get)]
    alice_outcome: String,
    #[pyo3(get)]
    bob_outcome: String,
    #[pyo3(get)]
    alice_correction: String,
    #[pyo3(get)]
    bob_correction: String,
    #[pyo3(get)]
    fidelity_alice_to_bob: f64,
    #[pyo3(get)]
    fidelity_bob_to_alice: f64,
    #[pyo3(get)]
    branch_probability: f64,
    /// Set by `enumerate_branches`; None for sampled runs.
    #[pyo3(get)]
    collapse_overlap: Option<f64>,
}

impl PyTranscript {
    fn from_core(t: &protocol::Transcript, collapse_overlap: Option<f64>) -> Self {
        Self {
            alice_outcome: t.alice_outcome.to_string(),
            bob_outcome: t.bob_outcome.to_string(),
            alice_correction: t.alice_correction.to_string(),
            bob_correction: t.bob_correction.to_string(),
            fidelity_alice_to_bob: t.fidelity_alice_to_bob,
            fidelity_bob_to_alice: t.fidelity_bob_to_alice,
            branch_probability: t.branch_probability,
            collapse_overlap,
        }
    }
}

#[pymethods]
impl PyTranscript {
    fn __repr__(&self) -> String {
        format!(
            "Transcript(alice={}, bob={}, F_a2b={:.6}, F_b2a={:.6})",
            self.alice_outcome,
            self.bob_outcome,
            self.fidelity_alice_to_bob,
            self.fidelity_bob_to_alice
        )
    }
}

/// Build the GHZ-like state c0|0...0⟩ + c1|1...1⟩ on n qubits.
#[pyfunction]
fn make_ghz_like(n: usize, c0: Complex64, c1: Complex64) -> PyResult<PyPureState> {
    let spec = spec(n, (c0, c1))?;
    Ok(PyPureState {
        inner: protocol::make_ghz_like(&spec).map_err(to_py_err)?,
    })
}

/// The four-qubit cluster channel ½(|0000⟩+|0011⟩+|1100⟩+|1111⟩).
#[pyfunction]
fn make_cluster_channel() -> PyPureState {
    PyPureState {
        inner: protocol::make_cluster_channel(),
    }
}

/// Run the bi-directional protocol once with sampled Bell measurements.
#[pyfunction]
#[pyo3(signature = (n_alice, alpha, n_bob, beta, seed=42))]
fn run_bqt(
    n_alice: usize,
    alpha: (Complex64, Complex64),
    n_bob: usize,
    beta: (Complex64, Complex64),
    seed: u64,
) -> PyResult<PyTranscript> {
    let alice = spec(n_alice, alpha)?;
    let bob = spec(n_bob, beta)?;
    let mut rng = SimRng::seeded(seed);
    let t = protocol::run_bqt(&alice, &bob, &mut rng).map_err(to_py_err)?;
    Ok(PyTranscript::from_core(&t, None))
}

/// Force all sixteen (Alice, Bob) measurement branches in turn.
#[pyfunction]
fn enumerate_branches(
    n_alice: usize,
    alpha: (Complex64, Complex64),
    n_bob: usize,
    beta: (Complex64, Complex64),
) -> PyResult<Vec<PyTranscript>> {
    let alice = spec(n_alice, alpha)?;
    let bob = spec(n_bob, beta)?;
    let branches = protocol::enumerate_branches(&alice, &bob).map_err(to_py_err)?;
    Ok(branches
        .iter()
        .map(|b| PyTranscript::from_core(&b.transcript, Some(b.collapse_overlap)))
        .collect())
}

/// Exact channel fidelity √(⟨Φ|ϱ|Φ⟩) for one noise kind at strength p.
#[pyfunction]
fn channel_fidelity_exact(kind: &str, p: f64) -> PyResult<f64> {
    noise::channel_fidelity_exact(parse_kind(kind)?, p).map_err(to_py_err)
}

/// The closed-form fidelity as quoted in the literature (reporting only).
#[pyfunction]
fn published_closed_form(kind: &str, p: f64) -> PyResult<f64> {
    noise::published_closed_form(parse_kind(kind)?, p).map_err(to_py_err)
}

/// Sweep (p, exact, published) triples over an inclusive grid.
#[pyfunction]
#[pyo3(signature = (kind, start=0.0, stop=1.0, count=101))]
fn noise_sweep(kind: &str, start: f64, stop: f64, count: usize) -> PyResult<Vec<(f64, f64, f64)>> {
    if count < 2 {
        return Err(PyValueError::new_err("grid needs at least two points"));
    }
    let step = (stop - start) / (count - 1) as f64;
    let grid: Vec<f64> = (0..count)
        .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
        .collect();
    let curve = noise::sweep(parse_kind(kind)?, &grid).map_err(to_py_err)?;
    Ok(curve
        .samples
        .iter()
        .map(|s| (s.p, s.exact, s.published))
        .collect())
}

/// The encoded twelve-qubit channel state.
#[pyfunction]
fn encode_logical_channel() -> PyPureState {
    PyPureState {
        inner: qec::encode_logical_channel(),
    }
}

/// Closed-form correction success probability (1−p)^12 + 12p(1−p)^11.
#[pyfunction]
fn p_ec_closed_form(p: f64) -> f64 {
    qec::p_ec_closed_form(p)
}

/// Complement of `p_ec_closed_form`.
#[pyfunction]
fn p_e_closed_form(p: f64) -> f64 {
    qec::p_e_closed_form(p)
}

/// Monte Carlo estimate of the correction success probability.
/// Returns (estimate, standard_error).
#[pyfunction]
#[pyo3(signature = (p, trials=100_000, seed=42))]
fn monte_carlo_pec(p: f64, trials: u64, seed: u64) -> PyResult<(f64, f64)> {
    qec::monte_carlo_pec(p, trials, seed).map_err(to_py_err)
}

/// Noise strength where the bit-flip code stops paying off (p_e = p).
#[pyfunction]
fn crossover_threshold() -> f64 {
    qec::crossover_threshold()
}

#[pymodule]
fn bqtsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyTranscript>()?;
    m.add_function(wrap_pyfunction!(make_ghz_like, m)?)?;
    m.add_function(wrap_pyfunction!(make_cluster_channel, m)?)?;
    m.add_function(wrap_pyfunction!(run_bqt, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_branches, m)?)?;
    m.add_function(wrap_pyfunction!(channel_fidelity_exact, m)?)?;
    m.add_function(wrap_pyfunction!(published_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(noise_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(encode_logical_channel, m)?)?;
    m.add_function(wrap_pyfunction!(p_ec_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(p_e_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_pec, m)?)?;
    m.add_function(wrap_pyfunction!(crossover_threshold, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
