//! Semiclassical dynamics of the extended Dicke model.
//!
//! A single cavity mode `(q, p)` coupled to a collective spin `S` with an
//! extra `Sy²` self-interaction:
//!
//! ```text
//! H = (p² + ω²q²)/2 + g·p·Sy − ω₀·Sz + (1 + ε)·g²·Sy²/2
//! ```
//!
//! * [`model`]: parameters, state types, vector field and energy.
//! * [`equilibria`]: stationary points, critical coupling and stability.
//! * [`elliptic`]: Jacobi elliptic functions and elliptic integrals.
//! * [`analytic`]: closed-form periodic orbits on the slow manifold.
//! * [`dynamics`]: adaptive integration, conservation checks, section crossings.
//! * [`poincare`]: Poincaré sections, Lyapunov exponents and regularity scores.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dynamics;
pub mod elliptic;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod poincare;

pub use error::{Error, Result};
pub use model::{
    critical_coupling, eom_rhs, hamiltonian, reduced_energy, reduced_eom_rhs, spin_norm, ModelParams, PhaseState, Spin,
};
