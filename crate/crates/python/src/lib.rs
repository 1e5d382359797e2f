//! Python bindings: oscillator sums, linear systems, mean motion, torus volumes and zero counting.

use meanmotion::bessel;
use meanmotion::mean_motion::{self as mm, UnwrapConfig};
use meanmotion::spectral::{self, DEFAULT_TOL_RANK, DEFAULT_TOL_SPEC};
use meanmotion::switching::{self, ZeroConfig};
use meanmotion::torus_volume::{self as tv, AmplitudeSet, QuadratureConfig, TorusVolumeResult};
use meanmotion::{Error, Term};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(err: Error) -> PyErr {
    if err.is_validation() {
        PyValueError::new_err(err.to_string())
    } else {
        PyRuntimeError::new_err(err.to_string())
    }
}

fn quadrature(tol: Option<f64>) -> QuadratureConfig {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = tol {
        cfg.tol = t;
    }
    cfg
}

/// z(t) = Σ a_k e^{iλ_k t}; the switching function is m(t) = Re z(t).
#[pyclass(frozen, module = "meanmotion")]
struct OscillatorSum {
    inner: meanmotion::OscillatorSum,
}

#[pymethods]
impl OscillatorSum {
    /// Build from complex amplitudes and real frequencies.
    #[new]
    fn new(amplitudes: Vec<Complex64>, frequencies: Vec<f64>) -> PyResult<Self> {
        if amplitudes.len() != frequencies.len() {
            return Err(PyValueError::new_err("amplitudes and frequencies differ in length"));
        }
        let terms = amplitudes
            .into_iter()
            .zip(frequencies)
            .map(|(a, l)| Term::new(a, l))
            .collect();
        let inner = meanmotion::OscillatorSum::new(terms).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.terms().iter().map(|t| t.amplitude).collect()
    }

    #[getter]
    fn frequencies(&self) -> Vec<f64> {
        self.inner.frequencies()
    }

    #[getter]
    fn moduli(&self) -> Vec<f64> {
        self.inner.moduli()
    }

    fn z(&self, t: f64) -> Complex64 {
        self.inner.evaluate_z(t)
    }

    fn m(&self, t: f64) -> f64 {
        self.inner.eval_m(t)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "OscillatorSum(amplitudes={:?}, frequencies={:?})",
            self.amplitudes(),
            self.frequencies()
        )
    }
}

/// ẋ = Ax + bu with switching function m(t) = pᵀe^{−At}b.
#[pyclass(frozen, module = "meanmotion")]
struct LinearSystem {
    inner: spectral::LinearSystem,
}

#[pymethods]
impl LinearSystem {
    /// `a` is given as a list of rows.
    #[new]
    fn new(a: Vec<Vec<f64>>, b: Vec<f64>, p: Vec<f64>) -> PyResult<Self> {
        let inner = spectral::LinearSystem::from_rows(&a, &b, &p).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Block-diagonal A with 2×2 rotation blocks of the given frequencies.
    #[staticmethod]
    fn from_blocks(freqs: Vec<f64>, b: Vec<f64>, p: Vec<f64>) -> PyResult<Self> {
        let inner = spectral::LinearSystem::from_blocks(&freqs, &b, &p).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn eigenvalues(&self) -> PyResult<Vec<Complex64>> {
        spectral::eigenvalues(self.inner.a()).map_err(to_py)
    }

    fn oscillator_sum(&self) -> PyResult<OscillatorSum> {
        let inner = spectral::extract_oscillator_sum(&self.inner, DEFAULT_TOL_SPEC).map_err(to_py)?;
        Ok(OscillatorSum { inner })
    }

    /// (controllable, Kalman rank, Kalman determinant).
    fn controllability(&self) -> (bool, usize, f64) {
        let c = spectral::controllability_check(&self.inner, DEFAULT_TOL_RANK);
        (c.controllable, c.kalman_rank, c.kalman_determinant)
    }

    fn m(&self, t: f64) -> PyResult<f64> {
        self.inner.switching_value(t).map_err(to_py)
    }

    /// Bang-bang closed loop; returns (times, states, controls, switch_times).
    #[pyo3(signature = (x0, horizon, h))]
    fn simulate(&self, x0: Vec<f64>, horizon: f64, h: f64) -> PyResult<(Vec<f64>, Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
        let traj = switching::simulate_bang_bang(&self.inner, &x0, horizon, h).map_err(to_py)?;
        let times = traj.points.iter().map(|p| p.t).collect();
        let controls = traj.points.iter().map(|p| p.u).collect();
        let states = traj.points.into_iter().map(|p| p.state).collect();
        Ok((times, states, controls, traj.switch_times))
    }
}

fn volume_dict<'py>(py: Python<'py>, r: &TorusVolumeResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("error_estimate", r.error_estimate)?;
    d.set_item("method", format!("{:?}", r.method))?;
    Ok(d)
}

/// Ω = Σ λ_k V_k; returns a dict with omega, weights and their error estimates.
#[pyfunction]
#[pyo3(signature = (sum, tol = None))]
fn mean_motion<'py>(py: Python<'py>, sum: &OscillatorSum, tol: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let res = mm::mean_motion(&sum.inner, &quadrature(tol)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("omega", res.omega)?;
    d.set_item("omega_error", res.omega_error)?;
    d.set_item("weights", res.weights)?;
    d.set_item("weight_errors", res.weight_errors)?;
    d.set_item("weight_sum", res.weight_sum)?;
    d.set_item("resonance", format!("{:?}", res.resonance.status))?;
    d.set_item("resonance_witness", res.resonance.witness)?;
    Ok(d)
}

/// Φ(T)/T from continuous argument tracking.
#[pyfunction]
fn empirical_mean_motion(sum: &OscillatorSum, horizon: f64) -> PyResult<f64> {
    mm::empirical_mean_motion(&sum.inner, horizon, &UnwrapConfig::default())
        .map(|e| e.omega_hat)
        .map_err(to_py)
}

/// Integer relations among frequencies up to `bound`; returns (status, witness).
#[pyfunction]
#[pyo3(signature = (frequencies, bound = mm::DEFAULT_RESONANCE_BOUND))]
fn check_resonance(frequencies: Vec<f64>, bound: u32) -> PyResult<(String, Option<Vec<i64>>)> {
    let rep = mm::check_resonance(&frequencies, bound, None).map_err(to_py)?;
    Ok((format!("{:?}", rep.status), rep.witness))
}

/// W_m(r; amps). `method` is "auto", "closed", "bww" or "mc" (the latter needs `seed`).
#[pyfunction]
#[pyo3(signature = (r, amps, method = "auto", seed = None, samples = 1_000_000, tol = None))]
fn torus_volume<'py>(
    py: Python<'py>,
    r: f64,
    amps: Vec<f64>,
    method: &str,
    seed: Option<u64>,
    samples: u64,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let set = AmplitudeSet::new(amps).map_err(to_py)?;
    let cfg = quadrature(tol);
    let res = match (method, set.as_slice()) {
        ("auto", _) => tv::torus_volume(r, &set, &cfg),
        ("closed", [a]) => tv::w1_step(r, *a),
        ("closed", [a1, a2]) => tv::w2_closed_form(r, *a1, *a2),
        ("closed", _) => return Err(PyValueError::new_err("closed forms cover at most two amplitudes")),
        ("bww", _) => tv::w_bww(r, &set, &cfg),
        ("mc", _) => {
            let seed = seed.ok_or_else(|| PyValueError::new_err("method 'mc' needs a seed"))?;
            tv::w_monte_carlo(r, &set, samples, seed)
        }
        _ => return Err(PyValueError::new_err(format!("unknown method {method:?}"))),
    }
    .map_err(to_py)?;
    volume_dict(py, &res)
}

/// Zeros of m on [0, T]; returns (zeros, suspect_tangencies).
#[pyfunction]
#[pyo3(signature = (sum, horizon, oversample = 16))]
fn count_zeros(sum: &OscillatorSum, horizon: f64, oversample: u32) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let cfg = ZeroConfig {
        oversample,
        ..Default::default()
    };
    let res = switching::count_zeros(&sum.inner, horizon, &cfg).map_err(to_py)?;
    Ok((res.zeros, res.suspect_tangencies))
}

/// (lower, upper) bracket for N(T) with two real cosine terms.
#[pyfunction]
fn two_oscillator_bounds(a1: f64, l1: f64, a2: f64, l2: f64, horizon: f64) -> PyResult<(f64, f64)> {
    switching::two_oscillator_bounds(a1, l1, a2, l2, horizon).map_err(to_py)
}

#[pyfunction]
fn j0(x: f64) -> f64 {
    bessel::j0(x)
}

#[pyfunction]
fn j1(x: f64) -> f64 {
    bessel::j1(x)
}

#[pymodule(name = "_native")]
mod native {
    #[pymodule_export]
    use super::{
        check_resonance, count_zeros, empirical_mean_motion, j0, j1, mean_motion, torus_volume, two_oscillator_bounds,
        LinearSystem, OscillatorSum,
    };
}
