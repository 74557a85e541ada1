//! Python bindings. Slit indices passed to `measured` are 0-based, as in the
//! Rust API.

use ctp_core::error::CtpError;
use ctp_core::experiments::{self, ScreenPattern};
use ctp_core::lattice::{self, HopRange};
use ctp_core::measure::{self, MeasureContext};
use ctp_core::{density, sampling, Complex64};
use pyo3::exceptions::{PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn to_py(e: CtpError) -> PyErr {
    match e {
        CtpError::Capacity { .. } => PyOverflowError::new_err(e.to_string()),
        CtpError::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "LatticeConfig", module = "ctp")]
struct PyLatticeConfig {
    inner: lattice::LatticeConfig,
}

#[pymethods]
impl PyLatticeConfig {
    /// `hop_range=None` allows every hop.
    #[new]
    #[pyo3(signature = (sites, steps, alpha, hop_range=None))]
    fn new(sites: usize, steps: usize, alpha: f64, hop_range: Option<usize>) -> PyResult<Self> {
        let range = hop_range.map_or(HopRange::All, HopRange::Limited);
        let inner = lattice::LatticeConfig::new(sites, steps, alpha)
            .and_then(|c| c.with_hop_range(range))
            .map_err(to_py)?;
        Ok(PyLatticeConfig { inner })
    }

    /// Copy with only `open` sites reachable at slice `t`.
    fn with_mask(&self, t: usize, open: Vec<usize>) -> PyResult<Self> {
        let inner = self.inner.clone().with_mask(t, open).map_err(to_py)?;
        Ok(PyLatticeConfig { inner })
    }

    #[getter]
    fn sites(&self) -> usize {
        self.inner.sites
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!("LatticeConfig(sites={}, steps={}, alpha={})", c.sites, c.steps, c.alpha)
    }
}

#[pyclass(name = "SlitExperiment", module = "ctp")]
struct PySlitExperiment {
    inner: ctp_core::SlitExperiment,
}

fn pattern_rows<'py>(py: Python<'py>, p: &ScreenPattern) -> PyResult<Vec<Bound<'py, PyDict>>> {
    p.rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("x", r.x)?;
            d.set_item("total", r.total)?;
            d.set_item("direct", r.direct)?;
            d.set_item("interference", r.interference)?;
            d.set_item("slit_amps", r.slit_amps.clone())?;
            Ok(d)
        })
        .collect()
}

#[pymethods]
impl PySlitExperiment {
    #[new]
    #[pyo3(signature = (lattice, source, barrier_t, slits, measured=Vec::new()))]
    fn new(
        lattice: PyRef<'_, PyLatticeConfig>,
        source: usize,
        barrier_t: usize,
        slits: Vec<usize>,
        measured: Vec<usize>,
    ) -> PyResult<Self> {
        let inner = ctp_core::SlitExperiment::new(lattice.inner.clone(), source, barrier_t, slits, measured)
            .map_err(to_py)?;
        Ok(PySlitExperiment { inner })
    }

    #[getter]
    fn screen_t(&self) -> usize {
        self.inner.screen_t()
    }

    #[getter]
    fn measured(&self) -> Vec<usize> {
        self.inner.measured.iter().copied().collect()
    }

    fn with_measured(&self, measured: Vec<usize>) -> PyResult<Self> {
        let inner = self.inner.with_measured(measured).map_err(to_py)?;
        Ok(PySlitExperiment { inner })
    }

    /// One dict per screen site.
    fn pattern<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        pattern_rows(py, &experiments::pattern(&self.inner).map_err(to_py)?)
    }

    fn classical_baseline<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        pattern_rows(py, &experiments::classical_baseline(&self.inner).map_err(to_py)?)
    }

    fn slit_amplitudes(&self, x: usize) -> PyResult<Vec<Complex64>> {
        experiments::slit_amplitudes(&self.inner, x).map_err(to_py)
    }

    #[pyo3(signature = (rel_tol=1e-3))]
    fn null_events(&self, rel_tol: f64) -> PyResult<Vec<usize>> {
        experiments::find_null_events(&self.inner, rel_tol).map_err(to_py)
    }

    /// `(rows, report)` for `ρ` at slice `t`, defaulting to the screen.
    #[pyo3(signature = (t=None))]
    fn density<'py>(&self, py: Python<'py>, t: Option<usize>) -> PyResult<(Vec<Vec<Complex64>>, Bound<'py, PyDict>)> {
        let t = t.unwrap_or(self.inner.screen_t());
        let rho = density::density_at(&self.inner, t).map_err(to_py)?;
        let n = rho.dim();
        let rows = (0..n).map(|i| (0..n).map(|j| rho.entries[(i, j)]).collect()).collect();
        let r = rho.report();
        let d = PyDict::new(py);
        d.set_item("t", r.t)?;
        d.set_item("trace", r.trace)?;
        d.set_item("hermiticity_residual", r.hermiticity_residual)?;
        d.set_item("min_eigenvalue", r.min_eigenvalue)?;
        d.set_item("max_eigenvalue", r.max_eigenvalue)?;
        d.set_item("rank_estimate", r.rank_estimate)?;
        d.set_item("rank_bound", r.rank_bound)?;
        Ok((rows, d))
    }

    /// Normalized screen distribution `Φ̃`.
    fn distribution(&self) -> PyResult<Vec<f64>> {
        let p = experiments::pattern(&self.inner).map_err(to_py)?;
        Ok(sampling::normalize(&p).map_err(to_py)?.probs)
    }

    fn born_check<'py>(&self, py: Python<'py>, n: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let b = sampling::born_check(&self.inner, n, seed).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("pattern_probs", b.pattern_probs)?;
        d.set_item("state_probs", b.state_probs)?;
        d.set_item("route_residual", b.route_residual)?;
        d.set_item("counts", b.frequencies.counts)?;
        d.set_item("pass", b.pass)?;
        Ok(d)
    }
}

#[pyfunction]
fn path_sum_naive(lattice: PyRef<'_, PyLatticeConfig>, source: usize, target: usize) -> PyResult<Complex64> {
    lattice::path_sum_naive(&lattice.inner, source, target).map_err(to_py)
}

#[pyfunction]
fn path_sum_fast(lattice: PyRef<'_, PyLatticeConfig>, source: usize, target: usize) -> PyResult<Complex64> {
    lattice::path_sum_fast(&lattice.inner, source, target).map_err(to_py)
}

#[pyfunction]
fn count_paths(lattice: PyRef<'_, PyLatticeConfig>, source: usize, target: usize) -> PyResult<u128> {
    lattice::count_paths(&lattice.inner, source, target).map_err(to_py)
}

/// Per-bin counts of `n` seeded draws from `probs`.
#[pyfunction]
fn sample(probs: Vec<f64>, n: u64, seed: u64) -> PyResult<Vec<u64>> {
    let bins = (0..probs.len()).collect();
    let dist = sampling::NormalizedDistribution::from_weights(bins, &probs, ctp_core::tolerance::ACCUMULATED)
        .map_err(to_py)?;
    Ok(sampling::sample(&dist, n, seed).map_err(to_py)?.counts)
}

/// Axiom suite on `omega_size` random paths; returns `(passed, residuals)`.
#[pyfunction]
#[pyo3(signature = (omega_size, trials, seed, sites=6, steps=4))]
fn verify_axioms<'py>(
    py: Python<'py>,
    omega_size: usize,
    trials: usize,
    seed: u64,
    sites: usize,
    steps: usize,
) -> PyResult<(bool, Bound<'py, PyDict>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx = MeasureContext::random(sites, steps, omega_size, &mut rng).map_err(to_py)?;
    let report = measure::verify_axioms(&ctx, trials, seed).map_err(to_py)?;
    let d = PyDict::new(py);
    for (name, stat) in report.checks() {
        d.set_item(name, stat.max_residual)?;
    }
    Ok((report.passed(), d))
}

#[pymodule]
fn ctp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLatticeConfig>()?;
    m.add_class::<PySlitExperiment>()?;
    m.add_function(wrap_pyfunction!(path_sum_naive, m)?)?;
    m.add_function(wrap_pyfunction!(path_sum_fast, m)?)?;
    m.add_function(wrap_pyfunction!(count_paths, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(verify_axioms, m)?)?;
    Ok(())
}
