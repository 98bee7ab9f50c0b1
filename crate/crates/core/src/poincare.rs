//! Poincaré sections on `q = 0` at fixed energy, and chaos indicators.
//!
//! Section points are recorded in spin angles `θ = arccos(Sz/S)`,
//! `φ = atan2(Sy, Sx)`. Initial states are drawn sequentially from one
//! seeded stream before the batch fans out, and each trajectory is then
//! integrated independently, so results do not depend on how the batch is
//! scheduled across threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{crossings_until, solve, Direction, IntegratorConfig};
use crate::error::{Error, Result};
use crate::model::{eom_rhs, hamiltonian, ModelParams, PhaseState, Spin};

/// Which solution of the energy equation supplies the momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootChoice {
    /// `p ≥ −g·Sy`, the sheet that contains the slow manifold `p = −g·Sy`.
    #[default]
    Upper,
    /// Both roots, each as its own initial state.
    Both,
}

/// Momenta `p` with `H(spin, p, q = 0) = E`, largest first.
///
/// `p = −g·Sy ± √(2(E + ω₀Sz) − εg²Sy²)`.
pub fn momentum_on_section(params: &ModelParams, spin: &Spin, energy: f64) -> Result<Vec<f64>> {
    let g = params.g;
    let discriminant = 2.0 * (energy + params.omega0 * spin.sz) - params.epsilon * g * g * spin.sy * spin.sy;
    if discriminant < 0.0 || discriminant.is_nan() {
        return Err(Error::OffShell { discriminant });
    }
    let centre = -g * spin.sy;
    let root = discriminant.sqrt();
    if root == 0.0 {
        Ok(vec![centre])
    } else {
        Ok(vec![centre + root, centre - root])
    }
}

/// Attempts per requested state before giving up.
const ATTEMPTS_PER_STATE: usize = 10_000;

/// Spin drawn uniformly on the sphere of radius `s`.
fn uniform_spin(rng: &mut ChaCha8Rng, s: f64) -> Spin {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    Spin::new(s * rho * phi.cos(), s * rho * phi.sin(), s * z)
}

/// `n` states on the section `q = 0` at energy `energy`, from spins drawn
/// uniformly on the sphere and kept when a momentum root exists.
pub fn sample_on_shell(params: &ModelParams, energy: f64, n: usize, seed: u64) -> Result<Vec<PhaseState>> {
    sample_on_shell_with(params, energy, n, seed, RootChoice::Upper)
}

pub fn sample_on_shell_with(
    params: &ModelParams,
    energy: f64,
    n: usize,
    seed: u64,
    root: RootChoice,
) -> Result<Vec<PhaseState>> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = ATTEMPTS_PER_STATE.saturating_mul(n);
    let mut states = Vec::with_capacity(n);
    let mut accepted = 0;
    for _ in 0..cap {
        let spin = uniform_spin(&mut rng, params.spin_s);
        let Ok(roots) = momentum_on_section(params, &spin, energy) else { continue };
        accepted += 1;
        let chosen = match root {
            RootChoice::Upper => &roots[..1],
            RootChoice::Both => &roots[..],
        };
        for &p in chosen {
            if states.len() < n {
                states.push(spin.with_oscillator(p, 0.0));
            }
        }
        if states.len() == n {
            return Ok(states);
        }
    }
    Err(Error::ShellTooSmall { accepted, attempts: cap, rate: accepted as f64 / cap as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SectionConfig {
    pub energy: f64,
    pub n_trajectories: usize,
    /// Crossings recorded per trajectory after the transient.
    pub n_crossings: usize,
    pub seed: u64,
    pub direction: Direction,
    /// Crossings discarded before recording starts.
    pub transient_skip: usize,
    pub root: RootChoice,
    /// `t_end` caps the integration time of each trajectory.
    pub integrator: IntegratorConfig,
}

impl Default for SectionConfig {
    fn default() -> Self {
        Self {
            energy: 1.0,
            n_trajectories: 20,
            n_crossings: 1000,
            seed: 0,
            direction: Direction::Up,
            transient_skip: 0,
            root: RootChoice::Upper,
            integrator: IntegratorConfig { t_end: 2.0e4, ..IntegratorConfig::default() },
        }
    }
}

impl SectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trajectories == 0 {
            return Err(Error::InvalidConfig("n_trajectories must be at least 1".into()));
        }
        if self.n_crossings == 0 {
            return Err(Error::InvalidConfig("n_crossings must be at least 1".into()));
        }
        if !self.energy.is_finite() {
            return Err(Error::InvalidConfig("energy must be finite".into()));
        }
        self.integrator.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    /// `arccos(Sz/S)` in `[0, π]`.
    pub theta: f64,
    /// `atan2(Sy, Sx)` in `(−π, π]`; 0 at the poles.
    pub phi: f64,
    pub t: f64,
    pub traj_id: usize,
    pub state: PhaseState,
}

/// Spin angles `(θ, φ)` of a state.
pub fn spin_angles(state: &PhaseState, s: f64) -> (f64, f64) {
    let theta = (state.sz / s).clamp(-1.0, 1.0).acos();
    let phi = if state.sx == 0.0 && state.sy == 0.0 {
        0.0
    } else {
        let phi = state.sy.atan2(state.sx);
        if phi == -PI {
            PI
        } else {
            phi
        }
    };
    (theta, phi)
}

/// Section points of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySection {
    pub traj_id: usize,
    pub initial: PhaseState,
    pub points: Vec<SectionPoint>,
    /// Largest `|H − E|` seen at step ends and crossings.
    pub energy_drift: f64,
    /// Set when the integration stopped early; `points` holds what was found.
    pub error: Option<Error>,
}

/// Poincaré section of a batch of trajectories started on the energy shell.
pub fn poincare_section(params: &ModelParams, config: &SectionConfig) -> Result<Vec<TrajectorySection>> {
    params.validate()?;
    config.validate()?;
    let initial = sample_on_shell_with(params, config.energy, config.n_trajectories, config.seed, config.root)?;
    Ok(initial.par_iter().enumerate().map(|(traj_id, state0)| section_of(params, config, traj_id, state0)).collect())
}

/// Section of a single trajectory from `state0`.
pub fn section_of(
    params: &ModelParams,
    config: &SectionConfig,
    traj_id: usize,
    state0: &PhaseState,
) -> TrajectorySection {
    let wanted = config.transient_skip.saturating_add(config.n_crossings);
    let (crossings, drift, error) = match crossings_until(params, state0, &config.integrator, config.direction, wanted)
    {
        Ok((c, drift)) => (c, drift, None),
        Err(failure) => (failure.partial.states, f64::NAN, Some(failure.error)),
    };
    let drift = if drift.is_nan() {
        crossings
            .iter()
            .map(|c| (hamiltonian(params, &c.state) - hamiltonian(params, state0)).abs())
            .fold(0.0, f64::max)
    } else {
        drift
    };
    let points = crossings
        .into_iter()
        .skip(config.transient_skip)
        .map(|c| {
            let (theta, phi) = spin_angles(&c.state, params.spin_s);
            SectionPoint { theta, phi, t: c.t, traj_id, state: c.state }
        })
        .collect();
    TrajectorySection { traj_id, initial: *state0, points, energy_drift: drift, error }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LyapunovConfig {
    pub horizon: f64,
    pub renorm_interval: f64,
    /// Initial separation of the companion trajectory.
    pub d0: f64,
    pub seed: u64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Points in the convergence trace.
    pub trace_len: usize,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            horizon: 2.0e4,
            renorm_interval: 1.0,
            d0: 1e-8,
            seed: 0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.5,
            trace_len: 100,
        }
    }
}

impl LyapunovConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.renorm_interval > 0.0) || !(self.horizon >= self.renorm_interval) || !self.horizon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "need horizon >= renorm_interval > 0, got horizon = {}, renorm_interval = {}",
                self.horizon, self.renorm_interval
            )));
        }
        if !(self.d0 > 0.0) {
            return Err(Error::InvalidConfig("d0 must be positive".into()));
        }
        IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            ..IntegratorConfig::default()
        }
        .validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovResult {
    /// Largest Lyapunov exponent estimate, in units of 1/time.
    pub lambda: f64,
    /// `(t, running estimate)` pairs.
    pub trace: Vec<(f64, f64)>,
    /// Largest energy difference between the two trajectories.
    pub energy_gap: f64,
    /// The companion left the energy shell of the reference trajectory.
    pub shell_warning: bool,
}

/// Largest Lyapunov exponent by the two-trajectory renormalisation method.
pub fn lyapunov_exponent(params: &ModelParams, state0: &PhaseState, config: &LyapunovConfig) -> Result<LyapunovResult> {
    params.validate()?;
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let offset = tangent_offset(&mut rng, state0, config.d0);
    let reference_energy = hamiltonian(params, state0);
    let shell_bound = 1e-6 * reference_energy.abs().max(1.0);

    let mut pair = [0.0; 10];
    pair[..5].copy_from_slice(&state0.to_array());
    for i in 0..5 {
        pair[5 + i] = pair[i] + offset[i];
    }
    let ctl =
        crate::dynamics::StepControl { rel_tol: config.rel_tol, abs_tol: config.abs_tol, max_step: config.max_step };
    let rhs = |_: f64, y: &[f64; 10]| {
        let a = eom_rhs(params, &PhaseState::from_array(y[..5].try_into().unwrap())).to_array();
        let b = eom_rhs(params, &PhaseState::from_array(y[5..].try_into().unwrap())).to_array();
        std::array::from_fn(|i| if i < 5 { a[i] } else { b[i - 5] })
    };

    let n_intervals = (config.horizon / config.renorm_interval).round().max(1.0) as usize;
    let trace_every = (n_intervals / config.trace_len.max(1)).max(1);
    let mut log_sum = 0.0;
    let mut trace = Vec::new();
    let mut energy_gap: f64 = 0.0;
    for step in 1..=n_intervals {
        let mut end = pair;
        solve(rhs, 0.0, pair, config.renorm_interval, &ctl, |dense, y| {
            if dense.last {
                end = *y;
            }
            true
        })
        .map_err(Error::from)?;
        let diff: [f64; 5] = std::array::from_fn(|i| end[5 + i] - end[i]);
        let d = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
        log_sum += (d / config.d0).ln();
        let ra = PhaseState::from_array(end[..5].try_into().unwrap());
        let rb = PhaseState::from_array(end[5..].try_into().unwrap());
        energy_gap = energy_gap.max((hamiltonian(params, &rb) - hamiltonian(params, &ra)).abs());
        let scale = if d > 0.0 { config.d0 / d } else { 1.0 };
        pair = end;
        for i in 0..5 {
            pair[5 + i] = end[i] + diff[i] * scale;
        }
        if step % trace_every == 0 || step == n_intervals {
            let t = step as f64 * config.renorm_interval;
            trace.push((t, log_sum / t));
        }
    }
    let lambda = log_sum / (n_intervals as f64 * config.renorm_interval);
    Ok(LyapunovResult { lambda, trace, energy_gap, shell_warning: energy_gap > shell_bound })
}

/// Random offset of length `d0` whose spin part is tangent to the sphere.
fn tangent_offset(rng: &mut ChaCha8Rng, state: &PhaseState, d0: f64) -> [f64; 5] {
    loop {
        let mut v: [f64; 5] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let spin = state.spin();
        let n2 = spin.dot(&spin);
        if n2 > 0.0 {
            let along = (v[0] * spin.sx + v[1] * spin.sy + v[2] * spin.sz) / n2;
            v[0] -= along * spin.sx;
            v[1] -= along * spin.sy;
            v[2] -= along * spin.sz;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.map(|x| x * d0 / norm);
        }
    }
}

/// Settings for [`regularity_score`] and [`chaotic_fraction`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegularityConfig {
    /// Cells per axis of the `(θ, φ)` grid.
    pub grid: usize,
    pub min_points: usize,
    /// Scores above this count as chaotic.
    pub chaos_threshold: f64,
}

impl Default for RegularityConfig {
    fn default() -> Self {
        Self { grid: 100, min_points: 50, chaos_threshold: 0.3 }
    }
}

/// Per-trajectory regularity score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "value")]
pub enum Regularity {
    Score(f64),
    /// Fewer points than `min_points`.
    Insufficient,
}

impl Regularity {
    pub fn score(&self) -> Option<f64> {
        match self {
            Self::Score(s) => Some(*s),
            Self::Insufficient => None,
        }
    }
}

/// Occupied cells of the `(θ, φ)` grid divided by the number that `N`
/// independent uniform points would occupy on average,
/// `M(1 − (1 − 1/M)^N)`. A curve visits far fewer cells than a
/// space-filling scatter; the result is clipped to `[0, 1]`.
pub fn regularity_score(points: &[SectionPoint], config: &RegularityConfig) -> Regularity {
    if points.len() < config.min_points.max(1) {
        return Regularity::Insufficient;
    }
    let n = config.grid.max(1);
    let mut occupied = vec![false; n * n];
    for p in points {
        let i = ((p.theta / PI) * n as f64).floor().clamp(0.0, (n - 1) as f64) as usize;
        let j = (((p.phi + PI) / (2.0 * PI)) * n as f64).floor().clamp(0.0, (n - 1) as f64) as usize;
        occupied[i * n + j] = true;
    }
    let count = occupied.iter().filter(|&&o| o).count() as f64;
    let cells = (n * n) as f64;
    let expected = cells * (1.0 - (1.0 - 1.0 / cells).powf(points.len() as f64));
    Regularity::Score((count / expected).clamp(0.0, 1.0))
}

/// Scores of every trajectory in a section.
pub fn section_scores(sections: &[TrajectorySection], config: &RegularityConfig) -> Vec<Regularity> {
    sections.iter().map(|s| regularity_score(&s.points, config)).collect()
}

/// Fraction of scored trajectories whose score exceeds the threshold.
/// `None` when no trajectory has enough points.
pub fn chaotic_fraction(scores: &[Regularity], config: &RegularityConfig) -> Option<f64> {
    let scored: Vec<f64> = scores.iter().filter_map(Regularity::score).collect();
    if scored.is_empty() {
        return None;
    }
    let chaotic = scored.iter().filter(|&&s| s > config.chaos_threshold).count();
    Some(chaotic as f64 / scored.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(eps: f64, g: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, g, eps, 1.0).unwrap()
    }

    #[test]
    fn momentum_example() {
        let p = params(-1.0, 0.8);
        let roots = momentum_on_section(&p, &Spin::new(1.0, 0.0, 0.0), 1.0).unwrap();
        assert!((roots[0] - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((roots[1] + 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn momentum_decoupled() {
        let p = params(0.5, 0.0);
        let spin = Spin::new(0.0, 0.6, 0.8);
        let roots = momentum_on_section(&p, &spin, 0.0).unwrap();
        assert!((roots[0] - (1.6_f64).sqrt()).abs() < 1e-15);
        assert!(matches!(momentum_on_section(&p, &spin, -0.9), Err(Error::OffShell { .. })));
    }

    #[test]
    fn roots_lie_on_shell() {
        let p = params(-0.5, 1.7);
        let spin = Spin::new(0.3, -0.4, (0.75_f64).sqrt());
        for root in momentum_on_section(&p, &spin, 1.0).unwrap() {
            let h = hamiltonian(&p, &spin.with_oscillator(root, 0.0));
            assert!((h - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_shell() {
        let p = params(-0.5, 0.3);
        let err = sample_on_shell(&p, -50.0, 3, 1).unwrap_err();
        assert!(matches!(err, Error::ShellTooSmall { accepted: 0, .. }));
    }

    #[test]
    fn samples_are_on_shell_and_reproducible() {
        let p = params(-0.5, 1.5);
        let a = sample_on_shell(&p, 1.0, 25, 7).unwrap();
        let b = sample_on_shell(&p, 1.0, 25, 7).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert_eq!(s.q, 0.0);
            assert!((hamiltonian(&p, s) - 1.0).abs() < 1e-12);
            assert!(s.p >= -p.g * s.sy);
        }
        let both = sample_on_shell_with(&p, 1.0, 20, 7, RootChoice::Both).unwrap();
        assert_eq!(both.len(), 20);
        assert_eq!(both[0].spin(), both[1].spin());
    }

    #[test]
    fn angles() {
        assert_eq!(spin_angles(&PhaseState::new(0.0, 0.0, 1.0, 0.0, 0.0), 1.0), (0.0, 0.0));
        let (t, f) = spin_angles(&PhaseState::new(-1.0, -0.0, 0.0, 0.0, 0.0), 1.0);
        assert!((t - PI / 2.0).abs() < 1e-15);
        assert_eq!(f, PI);
    }

    #[test]
    fn fixed_point_section_collapses() {
        let p = params(-1.0, 2.0);
        let fp = crate::equilibria::fixed_points(&p)[2].state;
        let (theta0, phi0) = spin_angles(&fp, 1.0);
        let integrator = IntegratorConfig { t_end: 200.0, ..IntegratorConfig::default() };
        let cfg = SectionConfig { n_crossings: 50, direction: Direction::Both, integrator, ..Default::default() };
        let sec = section_of(&p, &cfg, 0, &fp);
        assert!(sec.error.is_none());
        for pt in &sec.points {
            assert!((pt.theta - theta0).abs() < 1e-9 && (pt.phi - phi0).abs() < 1e-9, "{pt:?}");
        }
    }

    fn synthetic(points: impl Iterator<Item = (f64, f64)>) -> Vec<SectionPoint> {
        points
            .map(|(theta, phi)| SectionPoint {
                theta,
                phi,
                t: 0.0,
                traj_id: 0,
                state: PhaseState::new(0.0, 0.0, 0.0, 0.0, 0.0),
            })
            .collect()
    }

    #[test]
    fn circle_scores_low() {
        let pts = synthetic((0..2000).map(|i| {
            let a = 2.0 * PI * i as f64 / 2000.0;
            (PI / 2.0 + 0.5 * a.cos(), 1.0 * a.sin())
        }));
        let s = regularity_score(&pts, &RegularityConfig::default()).score().unwrap();
        assert!(s < 0.15, "{s}");
    }

    #[test]
    fn uniform_scores_high() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = synthetic((0..2000).map(|_| (rng.random_range(0.0..PI), rng.random_range(-PI..PI))));
        let s = regularity_score(&pts, &RegularityConfig::default()).score().unwrap();
        assert!(s > 0.95, "{s}");
    }

    #[test]
    fn too_few_points() {
        let pts = synthetic((0..10).map(|i| (0.1 * i as f64, 0.0)));
        assert_eq!(regularity_score(&pts, &RegularityConfig::default()), Regularity::Insufficient);
        assert_eq!(chaotic_fraction(&[Regularity::Insufficient], &RegularityConfig::default()), None);
    }
}
