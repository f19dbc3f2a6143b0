//! Python bindings: scene parameters, scaling factors, forward solves, measurements and reconstruction.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use superlens::analytic;
use superlens::forward::{self, Grid, SolverOptions};
use superlens::measurement::{self, MeasurementSet};
use superlens::reconstruction::{self, ReconstructedProfile};
use superlens::SuperlensError;

fn to_py(e: SuperlensError) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        4 => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyfunction]
fn branch_sqrt(z: Complex64) -> Complex64 {
    superlens::branch_sqrt(z)
}

#[pyclass(name = "SceneParameters", module = "superlens_py")]
struct PyScene {
    inner: superlens::SceneParameters,
}

#[pymethods]
impl PyScene {
    #[new]
    #[pyo3(signature = (eps = Complex64::new(-1.0, 0.0), mu = Complex64::new(-1.0, 0.0), period = 1.0, wavelength = 1.1, slab_bottom = 0.1, slab_top = 0.2))]
    fn new(eps: Complex64, mu: Complex64, period: f64, wavelength: f64, slab_bottom: f64, slab_top: f64) -> PyResult<Self> {
        let inner = superlens::SceneParameters::new(period, wavelength, slab_bottom, slab_top, eps, mu).map_err(to_py)?;
        Ok(PyScene { inner })
    }

    #[staticmethod]
    fn superlens() -> Self {
        PyScene {
            inner: superlens::SceneParameters::superlens(),
        }
    }

    #[staticmethod]
    fn vacuum() -> Self {
        PyScene {
            inner: superlens::SceneParameters::vacuum(),
        }
    }

    #[getter]
    fn eps(&self) -> Complex64 {
        self.inner.eps
    }

    #[getter]
    fn mu(&self) -> Complex64 {
        self.inner.mu
    }

    #[getter]
    fn period(&self) -> f64 {
        self.inner.period
    }

    #[getter]
    fn wavelength(&self) -> f64 {
        self.inner.wavelength
    }

    #[getter]
    fn slab_bottom(&self) -> f64 {
        self.inner.slab_bottom
    }

    #[getter]
    fn slab_top(&self) -> f64 {
        self.inner.slab_top
    }

    fn wavenumber(&self) -> f64 {
        self.inner.wavenumber()
    }

    fn __repr__(&self) -> String {
        format!("SceneParameters({})", self.inner.label())
    }
}

#[pyclass(name = "Profile", module = "superlens_py")]
struct PyProfile {
    inner: forward::Profile,
}

#[pymethods]
impl PyProfile {
    #[staticmethod]
    fn smooth(delta: f64) -> Self {
        PyProfile {
            inner: forward::Profile::smooth(delta),
        }
    }

    #[staticmethod]
    fn tent(delta: f64) -> Self {
        PyProfile {
            inner: forward::Profile::tent(delta),
        }
    }

    #[staticmethod]
    fn boxcar(delta: f64) -> Self {
        PyProfile {
            inner: forward::Profile::boxcar(delta),
        }
    }

    /// `g(x) = sum_k amplitude_k cos(2 pi mode_k x / period)`.
    #[staticmethod]
    #[pyo3(signature = (delta, terms, period = 1.0))]
    fn cosine(delta: f64, terms: Vec<(i64, f64)>, period: f64) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(mode, amplitude)| forward::CosineTerm { mode, amplitude })
            .collect();
        let inner = forward::Profile::new(delta, period, forward::ProfileShape::CosineSum { terms }).map_err(to_py)?;
        Ok(PyProfile { inner })
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    /// `f(x) = delta g(x)` at the given points.
    fn evaluate(&self, x: Vec<f64>) -> Vec<f64> {
        x.iter().map(|&x| self.inner.delta * self.inner.g(x)).collect()
    }

    /// Fourier coefficient of `g` for mode `n`.
    fn coefficient(&self, n: i64) -> Complex64 {
        self.inner.coefficient(n)
    }
}

#[pyclass(name = "Reconstruction", module = "superlens_py")]
struct PyReconstruction {
    inner: ReconstructedProfile,
}

#[pymethods]
impl PyReconstruction {
    #[getter]
    fn cutoff(&self) -> usize {
        self.inner.cutoff
    }

    #[getter]
    fn skipped(&self) -> Vec<i64> {
        self.inner.skipped.clone()
    }

    /// `(n, f_n)` for `|n| <= cutoff`.
    fn coefficients(&self) -> Vec<(i64, Complex64)> {
        self.inner.coefficients.iter().collect()
    }

    /// Complex profile values; the imaginary part measures the inconsistency of the data.
    fn evaluate(&self, x: Vec<f64>) -> Vec<Complex64> {
        self.inner.evaluate(&x)
    }

    /// `(rel_l2, rel_linf, band_rel_l2)` against a true profile.
    #[pyo3(signature = (truth, points = 400))]
    fn errors(&self, truth: PyRef<'_, PyProfile>, points: usize) -> (f64, f64, f64) {
        let m = reconstruction::profile_error(&self.inner, &truth.inner, points);
        (m.rel_l2, m.rel_linf, m.band_rel_l2)
    }
}

#[pyfunction]
fn scaling_factor(n: i64, scene: PyRef<'_, PyScene>) -> PyResult<Complex64> {
    analytic::scaling_factor(n, &scene.inner).map_err(to_py)
}

#[pyfunction]
fn zeroth_order_trace(scene: PyRef<'_, PyScene>) -> PyResult<Complex64> {
    Ok(analytic::zeroth_order_field(&scene.inner).map_err(to_py)?.trace())
}

/// Labels and `|Upsilon_n|` as `moduli[set][n]`, `n = 0..=n_max`, for the five standard sets; `None` marks skipped modes.
#[pyfunction]
#[pyo3(signature = (n_max = 20))]
fn upsilon_scan(n_max: usize) -> PyResult<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let t = analytic::upsilon_scan(n_max, &analytic::experiment_parameter_sets()).map_err(to_py)?;
    Ok((t.labels, t.moduli))
}

/// Solves the forward problem and returns `(x, u(x, b))` on the grid columns.
#[pyfunction]
#[pyo3(signature = (profile, scene, nx = 256, ny_omega = 128, ny_slab = 128, loss = 0.0))]
fn forward_trace(
    py: Python<'_>,
    profile: PyRef<'_, PyProfile>,
    scene: PyRef<'_, PyScene>,
    nx: usize,
    ny_omega: usize,
    ny_slab: usize,
    loss: f64,
) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
    let grid = Grid::new(nx, ny_omega, ny_slab).map_err(to_py)?;
    let opts = SolverOptions {
        loss,
        ..SolverOptions::default()
    };
    let (profile, scene) = (profile.inner.clone(), scene.inner);
    let field = py
        .detach(move || forward::solve_total_field(&profile, &scene, &grid, &opts))
        .map_err(to_py)?;
    Ok((field.x(), forward::trace_on_gamma_b(&field)))
}

/// Samples a nodal trace at `m + 1` points and perturbs it with seeded relative noise.
#[pyfunction]
#[pyo3(signature = (trace, scene, m = 100, noise = 0.05, seed = 20240601))]
fn measure(trace: Vec<Complex64>, scene: PyRef<'_, PyScene>, m: usize, noise: f64, seed: u64) -> PyResult<Vec<Complex64>> {
    let clean = measurement::sample_trace(&trace, &scene.inner, m).map_err(to_py)?;
    if noise == 0.0 {
        return Ok(clean.samples);
    }
    Ok(measurement::apply_noise(&clean, noise, seed).map_err(to_py)?.samples)
}

/// Reconstructs the profile from `m + 1` samples `u(x_j, b)`, `x_j = j period / m`.
#[pyfunction]
fn reconstruct(samples: Vec<Complex64>, scene: PyRef<'_, PyScene>, cutoff: usize) -> PyResult<PyReconstruction> {
    if samples.len() < 2 {
        return Err(PyValueError::new_err("need at least two samples"));
    }
    let count = samples.len() - 1;
    let p = scene.inner;
    let ms = MeasurementSet {
        scene: p,
        count,
        x: (0..=count).map(|j| p.period * j as f64 / count as f64).collect(),
        samples,
        noise_level: 0.0,
        seed: None,
        rng: None,
    };
    let inner = reconstruction::reconstruct_profile(&ms, &p, cutoff).map_err(to_py)?;
    Ok(PyReconstruction { inner })
}

#[pymodule]
fn superlens_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScene>()?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PyReconstruction>()?;
    m.add_function(wrap_pyfunction!(branch_sqrt, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_factor, m)?)?;
    m.add_function(wrap_pyfunction!(zeroth_order_trace, m)?)?;
    m.add_function(wrap_pyfunction!(upsilon_scan, m)?)?;
    m.add_function(wrap_pyfunction!(forward_trace, m)?)?;
    m.add_function(wrap_pyfunction!(measure, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    Ok(())
}
