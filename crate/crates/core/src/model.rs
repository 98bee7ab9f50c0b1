//! Parameters, phase-space points and the classical equations of motion.
//!
//! The phase space is the spin sphere of radius `S` times the oscillator
//! plane `(p, q)`. Units are chosen with ħ = 1; every frequency and the
//! coupling are kept explicit so that no unit convention is baked in.
//!
//! Classical Hamiltonian:
//!
//! ```text
//! H = (p² + ω²q²)/2 + g·p·Sy − ω₀·Sz + (1 + ε)(g²/2)·Sy²
//! ```
//!
//! The spin equations follow from `{Sᵢ, Sⱼ} = εᵢⱼₖ Sₖ`, with the symmetrised
//! operator products replaced by plain products.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the extended Dicke model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Resonator frequency ω.
    pub omega: f64,
    /// Two-level splitting ω₀.
    pub omega0: f64,
    /// Coupling constant g.
    pub g: f64,
    /// Direct spin-spin interaction ε. The ordinary Dicke model is ε = −1.
    pub epsilon: f64,
    /// Total spin magnitude S.
    pub spin_s: f64,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, g: f64, epsilon: f64, spin_s: f64) -> Result<Self> {
        let params = Self { omega, omega0, g, epsilon, spin_s };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega, self.omega0, self.g, self.epsilon, self.spin_s].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!("omega must be > 0, got {}", self.omega)));
        }
        if self.omega0 <= 0.0 {
            return Err(Error::InvalidParams(format!("omega0 must be > 0, got {}", self.omega0)));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParams(format!("g must be >= 0, got {}", self.g)));
        }
        if self.spin_s <= 0.0 {
            return Err(Error::InvalidParams(format!("spin_s must be > 0, got {}", self.spin_s)));
        }
        Ok(())
    }

    /// Same parameters with a different coupling.
    pub fn with_coupling(self, g: f64) -> Self {
        Self { g, ..self }
    }

    /// Same parameters with the coupling set to `ratio · g_c`.
    ///
    /// Returns `None` for ε = 0, where the critical coupling is infinite.
    pub fn with_coupling_ratio(self, ratio: f64) -> Option<Self> {
        let gc = critical_coupling(&self);
        gc.is_finite().then(|| self.with_coupling(ratio * gc))
    }

    /// Sign of ε as ±1 (0 for ε = 0).
    pub fn eps_sign(&self) -> f64 {
        if self.epsilon > 0.0 {
            1.0
        } else if self.epsilon < 0.0 {
            -1.0
        } else {
            0.0
        }
    }
}

/// Spin block `(Sx, Sy, Sz)` of a phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Spin {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl Spin {
    pub const fn new(sx: f64, sy: f64, sz: f64) -> Self {
        Self { sx, sy, sz }
    }

    pub fn norm(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }

    pub fn dot(&self, other: &Spin) -> f64 {
        self.sx * other.sx + self.sy * other.sy + self.sz * other.sz
    }

    /// Rescale to length `s`. A zero vector is returned unchanged.
    pub fn rescaled(&self, s: f64) -> Spin {
        let n = self.norm();
        if n == 0.0 {
            return *self;
        }
        let f = s / n;
        Spin::new(self.sx * f, self.sy * f, self.sz * f)
    }

    /// Full phase-space point with the oscillator at `(p, q)`.
    pub fn with_oscillator(self, p: f64, q: f64) -> PhaseState {
        PhaseState { sx: self.sx, sy: self.sy, sz: self.sz, p, q }
    }
}

/// A point `(Sx, Sy, Sz, p, q)` of the phase space S² × ℝ².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub p: f64,
    pub q: f64,
}

impl PhaseState {
    pub const fn new(sx: f64, sy: f64, sz: f64, p: f64, q: f64) -> Self {
        Self { sx, sy, sz, p, q }
    }

    pub fn spin(&self) -> Spin {
        Spin::new(self.sx, self.sy, self.sz)
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.sx, self.sy, self.sz, self.p, self.q]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Time derivative of the full five-dimensional flow.
pub fn eom_rhs(params: &ModelParams, state: &PhaseState) -> PhaseState {
    let ModelParams { omega, omega0, g, epsilon, .. } = *params;
    let PhaseState { sx, sy, sz, p, q } = *state;
    let self_coupling = (1.0 + epsilon) * g * g;
    PhaseState {
        sx: g * p * sz + omega0 * sy + self_coupling * sy * sz,
        sy: -omega0 * sx,
        sz: -g * p * sx - self_coupling * sx * sy,
        p: -omega * omega * q,
        q: p + g * sy,
    }
}

/// Spin flow on the slow manifold `q = 0`, `p = −g·Sy`.
pub fn reduced_eom_rhs(params: &ModelParams, spin: &Spin) -> Spin {
    let ModelParams { omega0, g, epsilon, .. } = *params;
    let Spin { sx, sy, sz } = *spin;
    let eg2 = epsilon * g * g;
    Spin { sx: omega0 * sy + eg2 * sy * sz, sy: -omega0 * sx, sz: -eg2 * sx * sy }
}

/// Classical energy of a phase-space point.
pub fn hamiltonian(params: &ModelParams, state: &PhaseState) -> f64 {
    let ModelParams { omega, omega0, g, epsilon, .. } = *params;
    let PhaseState { sy, sz, p, q, .. } = *state;
    0.5 * (p * p + omega * omega * q * q) + g * p * sy - omega0 * sz + (1.0 + epsilon) * 0.5 * g * g * sy * sy
}

/// Energy on the slow manifold: `E = −ω₀Sz + (ε/2)g²Sy²`.
pub fn reduced_energy(params: &ModelParams, spin: &Spin) -> f64 {
    -params.omega0 * spin.sz + 0.5 * params.epsilon * params.g * params.g * spin.sy * spin.sy
}

pub fn spin_norm(state: &PhaseState) -> f64 {
    state.spin().norm()
}

/// Critical coupling `g_c = √(ω₀ / (|ε|·S))`; `f64::INFINITY` for ε = 0.
pub fn critical_coupling(params: &ModelParams) -> f64 {
    if params.epsilon == 0.0 {
        return f64::INFINITY;
    }
    (params.omega0 / (params.epsilon.abs() * params.spin_s)).sqrt()
}
