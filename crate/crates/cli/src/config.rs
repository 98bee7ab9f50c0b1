//! Run configuration, read from a TOML file with one table per command.
//!
//! ```toml
//! [model]
//! omega = 1.0
//! omega0 = 1.0
//! epsilon = -0.5
//! spin_s = 1.0
//! g_ratio = 1.4        # or an absolute `g`
//!
//! [integrator]
//! rel_tol = 1e-10
//! t_end = 1000.0
//!
//! [poincare]
//! energies = [1.0]
//! g_ratios = [0.2, 0.6, 1.0, 1.4]
//! ```
//!
//! Every key is optional. Unknown keys are rejected.

use std::path::Path;

use dicke_dyn::dynamics::{Direction, IntegratorConfig};
use dicke_dyn::poincare::{LyapunovConfig, RegularityConfig, RootChoice};
use dicke_dyn::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub integrator: IntegratorSection,
    pub bound_luminosity: BoundLuminositySection,
    pub simulate: SimulateSection,
    pub poincare: PoincareSection,
    pub potential: PotentialSection,
    pub lyapunov: LyapunovSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Replaces every seed in the file.
    pub fn override_seed(&mut self, seed: u64) {
        self.simulate.seed = seed;
        self.poincare.seed = seed;
        self.lyapunov.seed = seed;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
    /// Coupling in units of the critical coupling; takes precedence over `g`.
    pub g_ratio: Option<f64>,
    pub epsilon: f64,
    pub spin_s: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { omega: 1.0, omega0: 1.0, g: 1.0, g_ratio: None, epsilon: -0.5, spin_s: 1.0 }
    }
}

impl ModelSection {
    pub fn params(&self) -> CliResult<ModelParams> {
        let base = ModelParams::new(self.omega, self.omega0, self.g, self.epsilon, self.spin_s)?;
        match self.g_ratio {
            None => Ok(base),
            Some(ratio) => base
                .with_coupling_ratio(ratio)
                .ok_or_else(|| CliError::Config("g_ratio needs epsilon != 0".into()))
                .and_then(|p| p.validate().map(|_| p).map_err(CliError::from)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub renormalize_spin: bool,
    pub t_end: f64,
    pub sample_dt: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_step: d.max_step,
            renormalize_spin: d.renormalize_spin,
            t_end: d.t_end,
            sample_dt: d.sample_dt,
        }
    }
}

impl IntegratorSection {
    pub fn config(&self) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            renormalize_spin: self.renormalize_spin,
            t_end: self.t_end,
            sample_dt: self.sample_dt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundLuminositySection {
    /// Reduced energy of the orbit, started from its canonical point.
    pub energy: Option<f64>,
    /// Initial spin; used when `energy` is absent.
    pub spin0: Option<[f64; 3]>,
    /// Length of the output in periods of the full state.
    pub periods: f64,
    /// Explicit end time; required on the separatrix.
    pub t_end: Option<f64>,
    pub samples: usize,
    /// Add columns from the integrated reduced flow.
    pub numeric: bool,
}

impl Default for BoundLuminositySection {
    fn default() -> Self {
        Self { energy: None, spin0: None, periods: 3.0, t_end: None, samples: 601, numeric: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    /// `[Sx, Sy, Sz, p, q]`; when absent a state is drawn on the `energy` shell.
    pub state0: Option<[f64; 5]>,
    pub energy: f64,
    pub seed: u64,
    /// Integrate the spin-only flow with `p = −g·Sy`, `q = 0`.
    pub reduced: bool,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { state0: None, energy: 1.0, seed: 0, reduced: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoincareSection {
    pub energies: Vec<f64>,
    /// Couplings in units of g_c. When absent the model coupling is used.
    pub g_ratios: Option<Vec<f64>>,
    pub n_trajectories: usize,
    pub n_crossings: usize,
    pub transient_skip: usize,
    pub direction: Direction,
    pub root: RootChoice,
    pub t_end: f64,
    pub seed: u64,
    /// Also estimate a Lyapunov exponent per trajectory (settings from `[lyapunov]`).
    pub lyapunov: bool,
    pub grid: usize,
    pub min_points: usize,
    pub chaos_threshold: f64,
}

impl Default for PoincareSection {
    fn default() -> Self {
        let r = RegularityConfig::default();
        Self {
            energies: vec![1.0],
            g_ratios: None,
            n_trajectories: 20,
            n_crossings: 1000,
            transient_skip: 0,
            direction: Direction::Up,
            root: RootChoice::Upper,
            t_end: 2.0e4,
            seed: 0,
            lyapunov: false,
            grid: r.grid,
            min_points: r.min_points,
            chaos_threshold: r.chaos_threshold,
        }
    }
}

impl PoincareSection {
    pub fn regularity(&self) -> RegularityConfig {
        RegularityConfig { grid: self.grid, min_points: self.min_points, chaos_threshold: self.chaos_threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSection {
    /// Samples of `U(γ)` over `[−2π, 2π]`.
    pub gamma_points: usize,
    /// Values of `C` for the quartic curves.
    pub c_values: Vec<f64>,
    /// The quartic is sampled on `[−x_max, x_max]`, `x = Sy/S`.
    pub x_max: f64,
    pub x_points: usize,
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self { gamma_points: 801, c_values: vec![-1.5, -1.0, -0.5, 0.5], x_max: 1.5, x_points: 301 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovSection {
    /// Single initial state; when absent `n_samples` states are drawn on the `energy` shell.
    pub state0: Option<[f64; 5]>,
    pub energy: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub horizon: f64,
    pub renorm_interval: f64,
    pub d0: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub trace_len: usize,
}

impl Default for LyapunovSection {
    fn default() -> Self {
        let d = LyapunovConfig::default();
        Self {
            state0: None,
            energy: 1.0,
            n_samples: 20,
            seed: d.seed,
            horizon: d.horizon,
            renorm_interval: d.renorm_interval,
            d0: d.d0,
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_step: d.max_step,
            trace_len: d.trace_len,
        }
    }
}

impl LyapunovSection {
    /// Estimator settings; `stream` decorrelates the offsets of different samples.
    pub fn config(&self, stream: u64) -> LyapunovConfig {
        LyapunovConfig {
            horizon: self.horizon,
            renorm_interval: self.renorm_interval,
            d0: self.d0,
            seed: self.seed.wrapping_add(stream),
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            trace_len: self.trace_len,
        }
    }
}
