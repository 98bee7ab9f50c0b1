//! Python module `dicke_dyn`.
//!
//! Parameters and states are small value classes. Trajectories, sections
//! and fixed points come back as plain lists, tuples and dicts.

// integration failures carry the partial trajectory
#![allow(clippy::result_large_err)]

use dicke_dyn::analytic::{bl_canonical, bl_constants, bl_period, bl_state, BoundLuminosityParams, Regime};
use dicke_dyn::dynamics::{integrate as integrate_full, integrate_reduced, IntegratorConfig};
use dicke_dyn::equilibria::{fixed_points as core_fixed_points, order_parameter as core_order_parameter};
use dicke_dyn::poincare::{
    chaotic_fraction, lyapunov_exponent as core_lyapunov, poincare_section as core_section, regularity_score,
    sample_on_shell as core_sample, LyapunovConfig, RegularityConfig, SectionConfig,
};
use dicke_dyn::{elliptic, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParams(_)
        | Error::InvalidConfig(_)
        | Error::ParameterDomain { .. }
        | Error::ReciprocalDomain { .. }
        | Error::OffShell { .. }
        | Error::NoBoundRegime
        | Error::Degenerate(_)
        | Error::InfinitePeriod
        | Error::Divergent => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "ModelParams", module = "dicke_dyn", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyModelParams(dicke_dyn::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (omega = 1.0, omega0 = 1.0, g = 1.0, epsilon = -1.0, spin_s = 1.0))]
    fn new(omega: f64, omega0: f64, g: f64, epsilon: f64, spin_s: f64) -> PyResult<Self> {
        dicke_dyn::ModelParams::new(omega, omega0, g, epsilon, spin_s).map(Self).map_err(py_err)
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega
    }
    #[getter]
    fn omega0(&self) -> f64 {
        self.0.omega0
    }
    #[getter]
    fn g(&self) -> f64 {
        self.0.g
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }
    #[getter]
    fn spin_s(&self) -> f64 {
        self.0.spin_s
    }

    /// `g_c = √(ω₀/(|ε|S))`, infinite for ε = 0.
    fn critical_coupling(&self) -> f64 {
        dicke_dyn::critical_coupling(&self.0)
    }

    fn with_coupling(&self, g: f64) -> Self {
        Self(self.0.with_coupling(g))
    }

    /// Copy with `g = ratio·g_c`.
    fn with_coupling_ratio(&self, ratio: f64) -> PyResult<Self> {
        self.0
            .with_coupling_ratio(ratio)
            .map(Self)
            .ok_or_else(|| PyValueError::new_err("g_c is infinite for epsilon = 0"))
    }

    fn __repr__(&self) -> String {
        let p = self.0;
        format!(
            "ModelParams(omega={}, omega0={}, g={}, epsilon={}, spin_s={})",
            p.omega, p.omega0, p.g, p.epsilon, p.spin_s
        )
    }
}

#[pyclass(name = "PhaseState", module = "dicke_dyn", skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyPhaseState(dicke_dyn::PhaseState);

#[pymethods]
impl PyPhaseState {
    #[new]
    #[pyo3(signature = (sx, sy, sz, p = 0.0, q = 0.0))]
    fn new(sx: f64, sy: f64, sz: f64, p: f64, q: f64) -> Self {
        Self(dicke_dyn::PhaseState::new(sx, sy, sz, p, q))
    }

    #[getter]
    fn sx(&self) -> f64 {
        self.0.sx
    }
    #[getter]
    fn sy(&self) -> f64 {
        self.0.sy
    }
    #[getter]
    fn sz(&self) -> f64 {
        self.0.sz
    }
    #[getter]
    fn p(&self) -> f64 {
        self.0.p
    }
    #[getter]
    fn q(&self) -> f64 {
        self.0.q
    }

    /// `[Sx, Sy, Sz, p, q]`
    #[allow(clippy::wrong_self_convention)]
    fn to_list(&self) -> [f64; 5] {
        self.0.to_array()
    }

    fn __repr__(&self) -> String {
        let s = self.0;
        format!("PhaseState(sx={}, sy={}, sz={}, p={}, q={})", s.sx, s.sy, s.sz, s.p, s.q)
    }
}

/// One exact bound-luminosity orbit, `p = −g·Sy`, `q = 0`.
#[pyclass(name = "BoundLuminosityOrbit", module = "dicke_dyn", frozen)]
pub struct PyOrbit {
    params: dicke_dyn::ModelParams,
    blp: BoundLuminosityParams,
}

#[pymethods]
impl PyOrbit {
    /// Orbit through the initial spin `(sx, sy, sz)`.
    #[new]
    fn new(params: &PyModelParams, sx: f64, sy: f64, sz: f64) -> PyResult<Self> {
        let spin = dicke_dyn::Spin::new(sx, sy, sz);
        let blp = bl_constants(&params.0, &spin).map_err(py_err)?;
        Ok(Self { params: params.0, blp })
    }

    /// Orbit of energy `energy` started at its canonical point.
    #[staticmethod]
    fn from_energy(params: &PyModelParams, energy: f64) -> PyResult<Self> {
        let blp = bl_canonical(&params.0, energy).map_err(py_err)?;
        Ok(Self { params: params.0, blp })
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.blp.energy
    }
    #[getter]
    fn c_const(&self) -> f64 {
        self.blp.c_const
    }
    #[getter]
    fn k_param(&self) -> f64 {
        self.blp.k_param
    }
    /// "libration", "rotation" or "separatrix"
    #[getter]
    fn regime(&self) -> &'static str {
        match self.blp.regime {
            Regime::Libration => "libration",
            Regime::Rotation => "rotation",
            Regime::Separatrix => "separatrix",
        }
    }

    fn state(&self, t: f64) -> PyResult<PyPhaseState> {
        bl_state(&self.params, &self.blp, t).map(PyPhaseState).map_err(py_err)
    }

    /// Raises ValueError on the separatrix.
    fn period(&self) -> PyResult<f64> {
        bl_period(&self.params, &self.blp).map_err(py_err)
    }
}

fn integrator(
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
    t_end: f64,
    sample_dt: f64,
    renormalize: bool,
) -> IntegratorConfig {
    IntegratorConfig { rel_tol, abs_tol, max_step, renormalize_spin: renormalize, t_end, sample_dt }
}

#[pyfunction]
fn critical_coupling(params: &PyModelParams) -> f64 {
    dicke_dyn::critical_coupling(&params.0)
}

#[pyfunction]
fn hamiltonian(params: &PyModelParams, state: &PyPhaseState) -> f64 {
    dicke_dyn::hamiltonian(&params.0, &state.0)
}

/// Time derivative of the state.
#[pyfunction]
fn eom_rhs(params: &PyModelParams, state: &PyPhaseState) -> PyPhaseState {
    PyPhaseState(dicke_dyn::eom_rhs(&params.0, &state.0))
}

/// Superradiant tilt `√(S² − ω₀²/(ε²g⁴))`, zero below threshold.
#[pyfunction]
fn order_parameter(params: &PyModelParams) -> f64 {
    core_order_parameter(&params.0)
}

/// Stationary points as dicts with keys kind, stability, gamma, curvature, state.
#[pyfunction]
fn fixed_points<'py>(py: Python<'py>, params: &PyModelParams) -> PyResult<Vec<Bound<'py, PyDict>>> {
    core_fixed_points(&params.0)
        .into_iter()
        .map(|fp| {
            let d = PyDict::new(py);
            d.set_item("kind", fp.kind.as_str())?;
            d.set_item("stability", fp.stability.as_str())?;
            d.set_item("gamma", fp.gamma)?;
            d.set_item("curvature", fp.curvature)?;
            d.set_item("state", PyPhaseState(fp.state))?;
            Ok(d)
        })
        .collect()
}

/// `(sn, cn, dn)` for any `m ≥ 0`.
#[pyfunction]
fn jacobi(u: f64, m: f64) -> PyResult<(f64, f64, f64)> {
    let j = elliptic::jacobi(u, m).map_err(py_err)?;
    Ok((j.sn, j.cn, j.dn))
}

#[pyfunction]
fn ellint_f(phi: f64, m: f64) -> PyResult<f64> {
    elliptic::ellint_f(phi, m).map_err(py_err)
}

#[pyfunction]
fn ellint_k(m: f64) -> PyResult<f64> {
    elliptic::ellint_k(m).map_err(py_err)
}

/// Integrate the full flow. Returns `(times, states)`.
#[pyfunction]
#[pyo3(signature = (params, state, t_end, sample_dt = 0.1, rel_tol = 1e-10, abs_tol = 1e-12, max_step = 0.1, renormalize = false))]
#[allow(clippy::too_many_arguments)]
fn integrate(
    py: Python<'_>,
    params: &PyModelParams,
    state: &PyPhaseState,
    t_end: f64,
    sample_dt: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
    renormalize: bool,
) -> PyResult<(Vec<f64>, Vec<PyPhaseState>)> {
    let cfg = integrator(rel_tol, abs_tol, max_step, t_end, sample_dt, renormalize);
    let (p, s) = (params.0, state.0);
    let traj = py.detach(|| integrate_full(&p, &s, &cfg)).map_err(|f| py_err(f.error))?;
    Ok((traj.times, traj.states.into_iter().map(PyPhaseState).collect()))
}

type SpinSamples = (Vec<f64>, Vec<(f64, f64, f64)>);

/// Integrate the reduced spin flow on `p = −g·Sy`, `q = 0`. Returns
/// `(times, [(Sx, Sy, Sz), ...])`.
#[pyfunction]
#[pyo3(signature = (params, sx, sy, sz, t_end, sample_dt = 0.1, rel_tol = 1e-10, abs_tol = 1e-12, max_step = 0.1))]
#[allow(clippy::too_many_arguments)]
fn integrate_spin(
    py: Python<'_>,
    params: &PyModelParams,
    sx: f64,
    sy: f64,
    sz: f64,
    t_end: f64,
    sample_dt: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
) -> PyResult<SpinSamples> {
    let cfg = integrator(rel_tol, abs_tol, max_step, t_end, sample_dt, false);
    let (p, s) = (params.0, dicke_dyn::Spin::new(sx, sy, sz));
    let traj = py.detach(|| integrate_reduced(&p, &s, &cfg)).map_err(|f| py_err(f.error))?;
    Ok((traj.times, traj.states.into_iter().map(|s| (s.sx, s.sy, s.sz)).collect()))
}

/// `n` states drawn uniformly on the energy shell.
#[pyfunction]
#[pyo3(signature = (params, energy, n, seed = 0))]
fn sample_on_shell(params: &PyModelParams, energy: f64, n: usize, seed: u64) -> PyResult<Vec<PyPhaseState>> {
    core_sample(&params.0, energy, n, seed).map(|v| v.into_iter().map(PyPhaseState).collect()).map_err(py_err)
}

/// Poincaré section at `q = 0`. One dict per trajectory with keys traj_id,
/// initial, points (list of `(t, theta, phi)`), energy_drift, score and error.
#[pyfunction]
#[pyo3(signature = (params, energy, n_trajectories = 20, n_crossings = 1000, seed = 0, t_end = 2.0e4))]
fn poincare_section<'py>(
    py: Python<'py>,
    params: &PyModelParams,
    energy: f64,
    n_trajectories: usize,
    n_crossings: usize,
    seed: u64,
    t_end: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = SectionConfig { energy, n_trajectories, n_crossings, seed, ..Default::default() };
    cfg.integrator.t_end = t_end;
    let p = params.0;
    let sections = py.detach(|| core_section(&p, &cfg)).map_err(py_err)?;
    let rc = RegularityConfig::default();
    sections
        .into_iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("traj_id", s.traj_id)?;
            d.set_item("initial", PyPhaseState(s.initial))?;
            d.set_item("points", s.points.iter().map(|pt| (pt.t, pt.theta, pt.phi)).collect::<Vec<_>>())?;
            d.set_item("energy_drift", s.energy_drift)?;
            d.set_item("score", regularity_score(&s.points, &rc).score())?;
            d.set_item("error", s.error.map(|e| e.to_string()))?;
            Ok(d)
        })
        .collect()
}

/// Fraction of scores above the chaos threshold; None if nothing was scored.
#[pyfunction]
fn chaotic_fraction_of(scores: Vec<Option<f64>>) -> Option<f64> {
    use dicke_dyn::poincare::Regularity;
    let scores: Vec<Regularity> =
        scores.into_iter().map(|s| s.map_or(Regularity::Insufficient, Regularity::Score)).collect();
    chaotic_fraction(&scores, &RegularityConfig::default())
}

/// Largest Lyapunov exponent from two nearby trajectories.
#[pyfunction]
#[pyo3(signature = (params, state, horizon = 2.0e4, renorm_interval = 1.0, d0 = 1e-8, seed = 0))]
fn lyapunov_exponent(
    py: Python<'_>,
    params: &PyModelParams,
    state: &PyPhaseState,
    horizon: f64,
    renorm_interval: f64,
    d0: f64,
    seed: u64,
) -> PyResult<f64> {
    let cfg = LyapunovConfig { horizon, renorm_interval, d0, seed, ..Default::default() };
    let (p, s) = (params.0, state.0);
    py.detach(|| core_lyapunov(&p, &s, &cfg)).map(|r| r.lambda).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "dicke_dyn")]
fn python_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyPhaseState>()?;
    m.add_class::<PyOrbit>()?;
    m.add_function(wrap_pyfunction!(critical_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(eom_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(order_parameter, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(ellint_f, m)?)?;
    m.add_function(wrap_pyfunction!(ellint_k, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_spin, m)?)?;
    m.add_function(wrap_pyfunction!(sample_on_shell, m)?)?;
    m.add_function(wrap_pyfunction!(poincare_section, m)?)?;
    m.add_function(wrap_pyfunction!(chaotic_fraction_of, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov_exponent, m)?)?;
    Ok(())
}
