//! Stationary points of the flow and their stability.
//!
//! Besides the two poles `Sz = ±S`, two tilted points
//! `x± = (0, ±R, −ω₀/(εg²), ∓gR, 0)` with `R² = S² − ω₀²/(ε²g⁴)` exist once
//! `g > g_c`. Stability is read off the effective potential in the spin
//! plane `Sz = S cos γ`, `Sy = S sin γ`:
//!
//! ```text
//! U(γ) = −ω₀S cos γ + (εg²/2)S² sin²γ
//! ```

use serde::{Deserialize, Serialize};

use crate::model::{ModelParams, PhaseState};

/// Step of the second difference of `U(γ)`.
pub const CURVATURE_STEP: f64 = 1e-5;
/// `|U''|` below this leaves an extremum unclassified.
pub const DEGENERATE_CURVATURE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    /// `Sz = +S`, `γ = 0`.
    PolePlus,
    /// `Sz = −S`, `γ = π`.
    PoleMinus,
    /// Tilted point with `Sy > 0`.
    SuperradiantPlus,
    /// Tilted point with `Sy < 0`.
    SuperradiantMinus,
}

impl FixedPointKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PolePlus => "pole_plus",
            Self::PoleMinus => "pole_minus",
            Self::SuperradiantPlus => "superradiant_plus",
            Self::SuperradiantMinus => "superradiant_minus",
        }
    }

    pub fn is_superradiant(&self) -> bool {
        matches!(self, Self::SuperradiantPlus | Self::SuperradiantMinus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Minimum,
    Maximum,
    /// `|U''|` too small to decide; happens at `g = g_c`.
    Degenerate,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Minimum => "minimum",
            Self::Maximum => "maximum",
            Self::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub state: PhaseState,
    pub kind: FixedPointKind,
    /// Angle of the spin from `+z` in the `(Sy, Sz)` plane.
    pub gamma: f64,
    /// Second difference of `U` at `gamma`.
    pub curvature: f64,
    pub stability: Stability,
}

/// `R² = S² − ω₀²/(ε²g⁴)`; the tilted points exist iff this is positive.
fn superradiant_radicand(params: &ModelParams) -> f64 {
    let eg2 = params.epsilon * params.g * params.g;
    params.spin_s * params.spin_s - params.omega0 * params.omega0 / (eg2 * eg2)
}

/// All stationary points: the two poles, plus the two tilted points when
/// they exist.
pub fn fixed_points(params: &ModelParams) -> Vec<FixedPoint> {
    let s = params.spin_s;
    let mut points = vec![
        point(params, PhaseState::new(0.0, 0.0, s, 0.0, 0.0), FixedPointKind::PolePlus, 0.0),
        point(params, PhaseState::new(0.0, 0.0, -s, 0.0, 0.0), FixedPointKind::PoleMinus, std::f64::consts::PI),
    ];
    let radicand = superradiant_radicand(params);
    if radicand > 0.0 {
        let r = radicand.sqrt();
        let sz = -params.omega0 / (params.epsilon * params.g * params.g);
        let gamma = (sz / s).clamp(-1.0, 1.0).acos();
        points.push(point(
            params,
            PhaseState::new(0.0, r, sz, -params.g * r, 0.0),
            FixedPointKind::SuperradiantPlus,
            gamma,
        ));
        points.push(point(
            params,
            PhaseState::new(0.0, -r, sz, params.g * r, 0.0),
            FixedPointKind::SuperradiantMinus,
            -gamma,
        ));
    }
    points
}

fn point(params: &ModelParams, state: PhaseState, kind: FixedPointKind, gamma: f64) -> FixedPoint {
    let curvature = potential_curvature(params, gamma);
    FixedPoint { state, kind, gamma, curvature, stability: classify(curvature) }
}

fn classify(curvature: f64) -> Stability {
    if curvature.abs() < DEGENERATE_CURVATURE {
        Stability::Degenerate
    } else if curvature > 0.0 {
        Stability::Minimum
    } else {
        Stability::Maximum
    }
}

/// `U(γ) = −ω₀S cos γ + (εg²/2)S² sin²γ`.
pub fn effective_potential_u(params: &ModelParams, gamma: f64) -> f64 {
    let s = params.spin_s;
    let sin = gamma.sin();
    -params.omega0 * s * gamma.cos() + 0.5 * params.epsilon * params.g * params.g * s * s * sin * sin
}

/// Central second difference `[U(γ+h) − 2U(γ) + U(γ−h)]/h²` with
/// `h = CURVATURE_STEP`, expanded with sum-to-product identities so that
/// it carries no cancellation error.
pub fn potential_curvature(params: &ModelParams, gamma: f64) -> f64 {
    let h = CURVATURE_STEP;
    let s = params.spin_s;
    let half = (0.5 * h).sin();
    let full = h.sin();
    let zeeman = 4.0 * params.omega0 * s * gamma.cos() * half * half;
    let squeeze = params.epsilon * params.g * params.g * s * s * (2.0 * gamma).cos() * full * full;
    (zeeman + squeeze) / (h * h)
}

/// Stability of every stationary point, in the order of [`fixed_points`].
pub fn classify_stability(params: &ModelParams) -> Vec<(FixedPointKind, Stability)> {
    fixed_points(params).into_iter().map(|fp| (fp.kind, fp.stability)).collect()
}

/// `|Sy|` at the tilted points: `S√(1 − g_c⁴/g⁴)` above threshold, else 0.
pub fn order_parameter(params: &ModelParams) -> f64 {
    let radicand = superradiant_radicand(params);
    if radicand > 0.0 {
        radicand.sqrt()
    } else {
        0.0
    }
}
