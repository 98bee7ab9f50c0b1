//! Time integration of the full and reduced flows.
//!
//! Both flows run through the same adaptive Dormand–Prince 8(5,3) stepper.
//! Output is sampled on a uniform grid from the step interpolant, and
//! `q = 0` crossings are located on the interpolant by bisection.

// failures carry the partial trajectory, so the error type is large
#![allow(clippy::result_large_err)]

mod solver;
mod tableau;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use solver::{solve, DenseStep, SolverStats, StepControl, Underflow};

use crate::error::{Error, Result};
use crate::model::{eom_rhs, hamiltonian, reduced_energy, reduced_eom_rhs, ModelParams, PhaseState, Spin};

/// Settings for a single integration run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Rescale the spin to length S after every accepted step.
    pub renormalize_spin: bool,
    pub t_end: f64,
    pub sample_dt: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_step: 0.1, renormalize_spin: false, t_end: 100.0, sample_dt: 0.1 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let tol_ok = |x: f64| x > 0.0 && x <= 1e-2;
        if !tol_ok(self.rel_tol) || !tol_ok(self.abs_tol) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must lie in (0, 1e-2], got rel_tol = {}, abs_tol = {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidConfig(format!("max_step must be positive, got {}", self.max_step)));
        }
        if !(self.sample_dt > 0.0) || !self.sample_dt.is_finite() {
            return Err(Error::InvalidConfig(format!("sample_dt must be positive, got {}", self.sample_dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!("t_end must be finite and non-negative, got {}", self.t_end)));
        }
        Ok(())
    }

    pub fn step_control(&self) -> StepControl {
        StepControl { rel_tol: self.rel_tol, abs_tol: self.abs_tol, max_step: self.max_step }
    }
}

/// A point of phase space that one of the flows acts on.
pub trait FlowState<const N: usize>: Copy + fmt::Debug {
    fn to_array(&self) -> [f64; N];
    fn from_array(a: [f64; N]) -> Self;
    fn velocity(params: &ModelParams, state: &Self) -> Self;
    fn energy(&self, params: &ModelParams) -> f64;
    fn spin_length(&self) -> f64;
    /// Rescales the spin block to length `s`; returns the size of the
    /// correction.
    fn renormalize(&mut self, s: f64) -> f64;
}

impl FlowState<5> for PhaseState {
    fn to_array(&self) -> [f64; 5] {
        PhaseState::to_array(self)
    }

    fn from_array(a: [f64; 5]) -> Self {
        PhaseState::from_array(a)
    }

    fn velocity(params: &ModelParams, state: &Self) -> Self {
        eom_rhs(params, state)
    }

    fn energy(&self, params: &ModelParams) -> f64 {
        hamiltonian(params, self)
    }

    fn spin_length(&self) -> f64 {
        self.spin().norm()
    }

    fn renormalize(&mut self, s: f64) -> f64 {
        let spin = self.spin();
        let fixed = spin.rescaled(s);
        self.sx = fixed.sx;
        self.sy = fixed.sy;
        self.sz = fixed.sz;
        (spin.norm() - s).abs()
    }
}

impl FlowState<3> for Spin {
    fn to_array(&self) -> [f64; 3] {
        [self.sx, self.sy, self.sz]
    }

    fn from_array(a: [f64; 3]) -> Self {
        Spin::new(a[0], a[1], a[2])
    }

    fn velocity(params: &ModelParams, state: &Self) -> Self {
        reduced_eom_rhs(params, state)
    }

    fn energy(&self, params: &ModelParams) -> f64 {
        reduced_energy(params, self)
    }

    fn spin_length(&self) -> f64 {
        self.norm()
    }

    fn renormalize(&mut self, s: f64) -> f64 {
        let before = self.norm();
        *self = self.rescaled(s);
        (before - s).abs()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    /// Largest relative energy deviation from `t = 0` over the samples.
    pub max_energy_drift: f64,
    /// Largest relative spin-length deviation from `t = 0` over the samples.
    pub max_spin_drift: f64,
    /// Sum of spin-length corrections applied by renormalisation.
    pub renorm_total: f64,
    /// Largest single spin-length correction.
    pub renorm_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub stats: TrajectoryStats,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &S)> {
        Some((*self.times.last()?, self.states.last()?))
    }
}

/// Integration stopped early; the samples gathered so far are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationFailure<S> {
    pub error: Error,
    pub partial: Trajectory<S>,
}

impl<S> fmt::Display for IntegrationFailure<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} samples kept)", self.error, self.partial.len())
    }
}

impl<S: fmt::Debug> std::error::Error for IntegrationFailure<S> {}

impl<S> From<Error> for IntegrationFailure<S> {
    fn from(error: Error) -> Self {
        Self { error, partial: Trajectory { times: Vec::new(), states: Vec::new(), stats: TrajectoryStats::default() } }
    }
}

pub type IntegrationResult<S> = std::result::Result<Trajectory<S>, IntegrationFailure<S>>;

fn relative_drift(value: f64, reference: f64) -> f64 {
    let scale = if reference != 0.0 { reference.abs() } else { 1.0 };
    (value - reference).abs() / scale
}

fn run<const N: usize, S: FlowState<N>>(
    params: &ModelParams,
    state0: S,
    config: &IntegratorConfig,
) -> IntegrationResult<S> {
    params.validate()?;
    config.validate()?;
    let s_len = params.spin_s;
    let e0 = state0.energy(params);
    let n0 = state0.spin_length();

    let mut traj = Trajectory { times: vec![0.0], states: vec![state0], stats: TrajectoryStats::default() };
    let mut next_index: usize = 1;
    let n_samples = (config.t_end / config.sample_dt).floor() as usize;
    let sample_time = |i: usize| i as f64 * config.sample_dt;

    let mut stats = TrajectoryStats::default();
    let record = |traj: &mut Trajectory<S>, stats: &mut TrajectoryStats, t: f64, mut s: S| {
        if config.renormalize_spin {
            s.renormalize(s_len);
        }
        stats.max_energy_drift = stats.max_energy_drift.max(relative_drift(s.energy(params), e0));
        stats.max_spin_drift = stats.max_spin_drift.max(relative_drift(s.spin_length(), n0));
        traj.times.push(t);
        traj.states.push(s);
    };

    let outcome = solve(
        |_, y: &[f64; N]| S::velocity(params, &S::from_array(*y)).to_array(),
        0.0,
        state0.to_array(),
        config.t_end,
        &config.step_control(),
        |step, y_new| {
            let t1 = step.t1();
            while next_index <= n_samples && sample_time(next_index) < t1 {
                let t = sample_time(next_index);
                record(&mut traj, &mut stats, t, S::from_array(step.eval(t)));
                next_index += 1;
            }
            if config.renormalize_spin {
                let mut s = S::from_array(*y_new);
                let correction = s.renormalize(s_len);
                stats.renorm_total += correction;
                stats.renorm_max = stats.renorm_max.max(correction);
                *y_new = s.to_array();
            }
            if step.last {
                let last = S::from_array(*y_new);
                if next_index <= n_samples && sample_time(next_index) <= config.t_end {
                    next_index += 1;
                }
                record(&mut traj, &mut stats, config.t_end, last);
            }
            true
        },
    );
    let solver_stats = match outcome {
        Ok(s) => s,
        Err(u) => {
            fill_solver_stats(&mut stats, u.stats);
            traj.stats = stats;
            return Err(IntegrationFailure { error: u.into(), partial: traj });
        }
    };
    fill_solver_stats(&mut stats, solver_stats);
    traj.stats = stats;
    Ok(traj)
}

fn fill_solver_stats(stats: &mut TrajectoryStats, solver: SolverStats) {
    stats.accepted_steps = solver.accepted_steps;
    stats.rejected_steps = solver.rejected_steps;
    stats.rhs_evals = solver.rhs_evals;
}

/// Integrates the full five-dimensional flow.
pub fn integrate(
    params: &ModelParams,
    state0: &PhaseState,
    config: &IntegratorConfig,
) -> IntegrationResult<PhaseState> {
    run(params, *state0, config)
}

/// Integrates the reduced spin flow on the slow manifold.
pub fn integrate_reduced(params: &ModelParams, spin0: &Spin, config: &IntegratorConfig) -> IntegrationResult<Spin> {
    run(params, *spin0, config)
}

/// Largest relative deviations of energy and spin length from their values
/// at the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub energy_drift: f64,
    pub spin_drift: f64,
}

pub fn conservation_report<const N: usize, S: FlowState<N>>(
    params: &ModelParams,
    traj: &Trajectory<S>,
) -> Result<ConservationReport> {
    let first = traj.states.first().ok_or(Error::EmptyTrajectory)?;
    let e0 = first.energy(params);
    let n0 = first.spin_length();
    let mut report = ConservationReport { energy_drift: 0.0, spin_drift: 0.0 };
    for s in &traj.states {
        report.energy_drift = report.energy_drift.max(relative_drift(s.energy(params), e0));
        report.spin_drift = report.spin_drift.max(relative_drift(s.spin_length(), n0));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `q̇ > 0` at the crossing.
    #[default]
    Up,
    /// `q̇ < 0` at the crossing.
    Down,
    Both,
}

impl Direction {
    fn accepts(&self, qdot: f64) -> bool {
        match self {
            Direction::Up => qdot > 0.0,
            Direction::Down => qdot < 0.0,
            Direction::Both => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub state: PhaseState,
}

/// Interior probes per step when scanning `q` for sign changes.
const CROSSING_PROBES: usize = 4;
const MAX_BISECTIONS: usize = 200;

/// Crossings of the surface `q = 0` with the requested orientation.
pub fn find_crossings(
    params: &ModelParams,
    state0: &PhaseState,
    config: &IntegratorConfig,
    direction: Direction,
) -> std::result::Result<Vec<Crossing>, IntegrationFailure<Crossing>> {
    crossings_until(params, state0, config, direction, usize::MAX).map(|(c, _)| c)
}

/// Like [`find_crossings`], stopping after `limit` crossings. Also returns
/// the largest `|H − H₀|` seen at step ends and crossings.
pub fn crossings_until(
    params: &ModelParams,
    state0: &PhaseState,
    config: &IntegratorConfig,
    direction: Direction,
    limit: usize,
) -> std::result::Result<(Vec<Crossing>, f64), IntegrationFailure<Crossing>> {
    params.validate()?;
    config.validate()?;
    let e0 = hamiltonian(params, state0);
    let mut drift: f64 = 0.0;
    let mut found = Vec::new();
    let outcome = solve(
        |_, y: &[f64; 5]| eom_rhs(params, &PhaseState::from_array(*y)).to_array(),
        0.0,
        state0.to_array(),
        config.t_end,
        &config.step_control(),
        |step, y_new| {
            let mut t_a = step.t0;
            let mut q_a = step.eval(t_a)[4];
            for j in 1..=CROSSING_PROBES + 1 {
                let t_b = if j == CROSSING_PROBES + 1 {
                    step.t1()
                } else {
                    step.t0 + step.h * j as f64 / (CROSSING_PROBES + 1) as f64
                };
                let q_b = step.eval(t_b)[4];
                let changes = (q_a < 0.0 && q_b > 0.0) || (q_a > 0.0 && q_b < 0.0) || (q_b == 0.0 && q_a != 0.0);
                if changes {
                    let c = refine(step, t_a, q_a, t_b, q_b);
                    let qdot = c.state.p + params.g * c.state.sy;
                    if direction.accepts(qdot) {
                        drift = drift.max((hamiltonian(params, &c.state) - e0).abs());
                        found.push(c);
                        if found.len() >= limit {
                            return false;
                        }
                    }
                }
                t_a = t_b;
                q_a = q_b;
            }
            if config.renormalize_spin {
                let mut s = PhaseState::from_array(*y_new);
                FlowState::renormalize(&mut s, params.spin_s);
                *y_new = s.to_array();
            }
            drift = drift.max((hamiltonian(params, &PhaseState::from_array(*y_new)) - e0).abs());
            true
        },
    );
    match outcome {
        Ok(_) => Ok((found, drift)),
        Err(u) => Err(IntegrationFailure {
            error: u.into(),
            partial: Trajectory {
                times: found.iter().map(|c| c.t).collect(),
                states: found,
                stats: TrajectoryStats::default(),
            },
        }),
    }
}

fn refine(step: &DenseStep<5>, mut t_a: f64, q_a: f64, mut t_b: f64, q_b: f64) -> Crossing {
    let at = |t: f64| PhaseState::from_array(step.eval(t));
    if q_b == 0.0 {
        return Crossing { t: t_b, state: at(t_b) };
    }
    let sign_a = q_a.signum();
    let mut best = at(t_b);
    let mut t_best = t_b;
    for _ in 0..MAX_BISECTIONS {
        let t_m = 0.5 * (t_a + t_b);
        let s = at(t_m);
        best = s;
        t_best = t_m;
        let tol = 1e-10 * s.euclidean_norm().max(1.0);
        if s.q.abs() < tol && (t_b - t_a) < 1e-12 * t_m.abs().max(1.0) || s.q == 0.0 {
            break;
        }
        if t_m <= t_a || t_m >= t_b {
            break;
        }
        if s.q.signum() == sign_a {
            t_a = t_m;
        } else {
            t_b = t_m;
        }
    }
    Crossing { t: t_best, state: best }
}
