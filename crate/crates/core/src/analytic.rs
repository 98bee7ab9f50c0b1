//! Closed-form "bound luminosity" solution of the reduced spin flow.
//!
//! On the slow manifold `q = 0`, `p = −g·Sy` two quantities are conserved:
//! the spin length `S` and the energy `E = −ω₀Sz + (ε/2)g²Sy²`. The second
//! one is equivalent to `Sz = (εg²/2ω₀)·Sy² + C` with `E = −ω₀C`. Feeding
//! both back into `S̈y = −ω₀Sy − ω₀εg²SySz` leaves a hardening Duffing
//! oscillator for `x = Sy/S` in the time `τ = ω₀t`:
//!
//! ```text
//! x'' = −a·x − b·x³,   a = 1 + r·c,   b = r²/2,
//! ½x'² + ½a·x² + ¼b·x⁴ = ½(1 − c²)
//! ```
//!
//! with `r = (g/g_c)² = |ε|g²S/ω₀` and `c = sign(ε)·C/S`. Its orbits are
//! Jacobi elliptic functions:
//!
//! * libration, `|E| < ω₀S`: `x = X·cn(Ωτ + u₀ | m)`, Sy changes sign;
//! * rotation, `sign(ε)E > ω₀S`: `x = ±X·dn(Ωτ + u₀ | m)`, Sy keeps its sign;
//! * separatrix, `sign(ε)E = ω₀S`: `x = ±X·sech(Ωτ + u₀)`, infinite period.
//!
//! `Sz` then follows from the conservation law, so it is a `cn²`/`dn²`
//! waveform, and `Sx = −Ṡy/ω₀`.
//!
//! The parameter `k = 2/(1 + sign(ε)E/(ω₀S))` of the pendulum picture is
//! kept as a regime label: `k > 1` is libration, `k < 1` rotation and
//! `k = 1` the separatrix. For `g ≫ g_c` the exact parameter `m` tends to
//! `1/k` (libration) or `k` (rotation).

use serde::{Deserialize, Serialize};

use crate::elliptic::{ellint_f, ellint_k, jacobi_sn_cn_dn};
use crate::error::{Error, Result};
use crate::model::{critical_coupling, ModelParams, PhaseState, Spin};

/// Relative tolerance for the initial spin lying on the sphere.
const SPHERE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `|E| < ω₀S`, `k > 1`: a single orbit around both superradiant points.
    Libration,
    /// `sign(ε)E > ω₀S`, `k < 1`: the orbit circles one superradiant point.
    Rotation,
    /// `sign(ε)E = ω₀S`, `k = 1`: homoclinic to the unstable pole.
    Separatrix,
}

/// Derived constants of one bound-luminosity orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundLuminosityParams {
    /// Conserved energy `E`.
    pub energy: f64,
    /// Integration constant `C = Sz − (εg²/2ω₀)Sy²`, with `E = −ω₀C`.
    pub c_const: f64,
    /// Pendulum-picture parameter `k = 2/(1 + sign(ε)E/(ω₀S))`.
    pub k_param: f64,
    /// Rate `du/dt` of the elliptic argument.
    pub u_rate: f64,
    /// Sign of ε, ±1.
    pub eps_sign: f64,
    pub regime: Regime,
    /// Elliptic parameter of the exact solution, in `[0, 1]`.
    pub m_eff: f64,
    /// Largest `|Sy|` on the orbit.
    pub amplitude: f64,
    /// Elliptic argument at `t = 0`.
    pub phase: f64,
    /// Sign of `Sy` for rotation and separatrix orbits.
    pub branch_sign: f64,
}

/// Duffing coefficients for a given `c = sign(ε)·C/S`.
#[derive(Debug, Clone, Copy)]
struct Duffing {
    a: f64,
    b: f64,
    /// Oscillator energy `½(1 − c²)`.
    h: f64,
    /// `√(a² + 4bh)`.
    disc: f64,
}

impl Duffing {
    fn new(r: f64, c: f64) -> Self {
        let a = 1.0 + r * c;
        let b = 0.5 * r * r;
        let h = 0.5 * (1.0 - c) * (1.0 + c);
        let disc = (a * a + 4.0 * b * h).max(0.0).sqrt();
        Self { a, b, h, disc }
    }

    /// Outer turning point `X²` of `x`.
    fn outer_sq(&self) -> f64 {
        if self.a > 0.0 {
            4.0 * self.h / (self.a + self.disc)
        } else {
            (self.disc - self.a) / self.b
        }
    }

    /// Inner turning point `X_min²` (rotation only).
    fn inner_sq(&self) -> f64 {
        ((-self.a - self.disc) / self.b).max(0.0)
    }

    fn regime(&self) -> Result<Regime> {
        if self.h > 0.0 {
            return Ok(Regime::Libration);
        }
        if self.a >= 0.0 {
            return Err(Error::Degenerate(
                "orbit collapses onto a stable pole (k undefined or pole below threshold)".into(),
            ));
        }
        if self.h == 0.0 {
            Ok(Regime::Separatrix)
        } else {
            Ok(Regime::Rotation)
        }
    }

    /// `(Ω, m)` for the regime.
    fn frequency_and_parameter(&self, regime: Regime, x_sq: f64) -> (f64, f64) {
        match regime {
            Regime::Libration => (self.disc.sqrt(), (self.b * x_sq / (2.0 * self.disc)).min(1.0)),
            Regime::Rotation => {
                let m = if x_sq > 0.0 { 2.0 * self.disc / (self.b * x_sq) } else { 0.0 };
                ((0.5 * self.b * x_sq).sqrt(), m.min(1.0))
            }
            Regime::Separatrix => ((-self.a).sqrt(), 1.0),
        }
    }
}

fn coupling_ratio_sq(params: &ModelParams) -> f64 {
    params.epsilon.abs() * params.g * params.g * params.spin_s / params.omega0
}

fn check_regime_params(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if params.epsilon == 0.0 {
        return Err(Error::NoBoundRegime);
    }
    if params.g <= 0.0 {
        return Err(Error::InvalidParams("bound-luminosity orbits need g > 0".into()));
    }
    Ok(())
}

/// Constants of the orbit through `spin0`.
pub fn bl_constants(params: &ModelParams, spin0: &Spin) -> Result<BoundLuminosityParams> {
    check_regime_params(params)?;
    let s_len = params.spin_s;
    if (spin0.norm() - s_len).abs() > SPHERE_TOL * s_len {
        return Err(Error::InvalidParams(format!("initial spin has length {}, expected {}", spin0.norm(), s_len)));
    }
    let omega0 = params.omega0;
    let sign = params.eps_sign();
    let gamma = params.epsilon * params.g * params.g / (2.0 * omega0);
    let c_const = spin0.sz - gamma * spin0.sy * spin0.sy;
    let energy = -omega0 * c_const;
    let reduced_e = sign * energy / (omega0 * s_len);
    let k_param = 2.0 / (1.0 + reduced_e);

    let c = sign * c_const / s_len;
    let duffing = Duffing::new(coupling_ratio_sq(params), c);
    let regime = duffing.regime()?;
    let x_sq = match regime {
        Regime::Separatrix => -2.0 * duffing.a / duffing.b,
        _ => duffing.outer_sq(),
    };
    let x_amp = x_sq.sqrt();
    let (freq, m) = duffing.frequency_and_parameter(regime, x_sq);

    let x0 = spin0.sy / s_len;
    // dx/dτ with τ = ω₀t
    let v0 = -spin0.sx / s_len;
    let branch_sign = if spin0.sy < 0.0 { -1.0 } else { 1.0 };
    let phase = match regime {
        Regime::Libration => libration_phase(x0, v0, x_amp, freq, m)?,
        Regime::Rotation => rotation_phase(x0.abs(), branch_sign * v0, x_amp, freq, m)?,
        Regime::Separatrix => {
            if x0 == 0.0 {
                // sitting on the pole itself: the orbit never leaves it
                f64::INFINITY
            } else {
                (-branch_sign * v0 * x_amp / (freq * x0 * x0)).asinh()
            }
        }
    };

    Ok(BoundLuminosityParams {
        energy,
        c_const,
        k_param,
        u_rate: omega0 * freq,
        eps_sign: sign,
        regime,
        m_eff: m,
        amplitude: s_len * x_amp,
        phase,
        branch_sign,
    })
}

/// `u₀` with `X·cn(u₀) = x₀` and `−XΩ·sn(u₀)dn(u₀) = v₀`.
fn libration_phase(x0: f64, v0: f64, x_amp: f64, freq: f64, m: f64) -> Result<f64> {
    let cos_phi = (x0 / x_amp).clamp(-1.0, 1.0);
    // sn²(1 − m·sn²) = w has two roots once m > ½; take the one closer to
    // the estimate 1 − cn², which is accurate where w is not
    let w = (v0 / (x_amp * freq)).powi(2);
    let from_cn = 1.0 - cos_phi * cos_phi;
    let sn_sq = if m > 0.0 {
        let root = (1.0 - 4.0 * m * w).max(0.0).sqrt();
        let lo = 2.0 * w / (1.0 + root);
        let hi = (1.0 + root) / (2.0 * m);
        if hi <= 1.0 && (hi - from_cn).abs() < (lo - from_cn).abs() {
            hi
        } else {
            lo
        }
    } else {
        w
    };
    let sin_phi = if v0 == 0.0 { 0.0 } else { -v0.signum() * sn_sq.min(1.0).sqrt() };
    let phi = sin_phi.atan2(cos_phi);
    ellint_f(phi, m)
}

/// `u₀ ∈ (−K, K]` with `X·dn(u₀) = |x₀|` and `−XΩm·sn·cn = σv₀`.
fn rotation_phase(abs_x0: f64, signed_v0: f64, x_amp: f64, freq: f64, m: f64) -> Result<f64> {
    if m == 0.0 {
        return Ok(0.0);
    }
    let from_dn = ((1.0 - (abs_x0 / x_amp).powi(2)) / m).clamp(0.0, 1.0);
    let w = (signed_v0 / (x_amp * freq * m)).powi(2).min(0.25);
    let lo = 2.0 * w / (1.0 + (1.0 - 4.0 * w).sqrt());
    let (sn_sq, cn_sq) = if from_dn < 0.5 { (lo, 1.0 - lo) } else { (1.0 - lo, lo) };
    let sn = if signed_v0 == 0.0 { 0.0 } else { -signed_v0.signum() * sn_sq.sqrt() };
    let sn = if signed_v0 == 0.0 && from_dn > 0.5 { 1.0 } else { sn };
    let phi = sn.atan2(cn_sq.sqrt());
    ellint_f(phi, m)
}

/// Constants of the orbit at energy `energy`, started where `sign(ε)·Sz` is
/// lowest on the orbit (for the separatrix: at the far turning point, since
/// the pole itself is only reached as `t → ±∞`).
pub fn bl_canonical(params: &ModelParams, energy: f64) -> Result<BoundLuminosityParams> {
    let spin0 = canonical_spin(params, energy)?;
    bl_constants(params, &spin0)
}

/// Starting spin used by [`bl_canonical`].
pub fn canonical_spin(params: &ModelParams, energy: f64) -> Result<Spin> {
    check_regime_params(params)?;
    let s_len = params.spin_s;
    let sign = params.eps_sign();
    let c_const = -energy / params.omega0;
    let c = sign * c_const / s_len;
    if c > 1.0 {
        return Err(Error::Degenerate(format!("energy {energy} lies below the reduced shell")));
    }
    let duffing = Duffing::new(coupling_ratio_sq(params), c);
    let regime = duffing.regime()?;
    let gamma = params.epsilon * params.g * params.g / (2.0 * params.omega0);
    let x0 = match regime {
        Regime::Libration => {
            let sx = -(s_len * s_len - c_const * c_const).max(0.0).sqrt();
            return Ok(Spin::new(sx, 0.0, c_const));
        }
        Regime::Rotation => {
            if duffing.a * duffing.a + 4.0 * duffing.b * duffing.h < 0.0 {
                return Err(Error::Degenerate(format!("energy {energy} lies above the reduced shell")));
            }
            duffing.inner_sq().sqrt()
        }
        Regime::Separatrix => (-2.0 * duffing.a / duffing.b).sqrt(),
    };
    let sy = s_len * x0;
    let sz = c_const + gamma * sy * sy;
    // Sx = 0 at both turning points; renormalise away rounding
    let sx_sq = s_len * s_len - sy * sy - sz * sz;
    debug_assert!(sx_sq.abs() < 1e-9 * s_len * s_len);
    Ok(Spin::new(0.0, sy, sz))
}

/// Phase-space point on the orbit at time `t`.
pub fn bl_state(params: &ModelParams, blp: &BoundLuminosityParams, t: f64) -> Result<PhaseState> {
    validate_blp(params, blp)?;
    let s_len = params.spin_s;
    let x_amp = blp.amplitude / s_len;
    let freq = blp.u_rate / params.omega0;
    let u = blp.u_rate * t + blp.phase;
    let (x, sx) = match blp.regime {
        Regime::Libration => {
            let j = jacobi_sn_cn_dn(u, blp.m_eff)?;
            (x_amp * j.cn, s_len * x_amp * freq * j.sn * j.dn)
        }
        Regime::Rotation => {
            let j = jacobi_sn_cn_dn(u, blp.m_eff)?;
            let sigma = blp.branch_sign;
            (sigma * x_amp * j.dn, sigma * s_len * x_amp * freq * blp.m_eff * j.sn * j.cn)
        }
        Regime::Separatrix => {
            let sigma = blp.branch_sign;
            let sech = if u.is_infinite() { 0.0 } else { 1.0 / u.cosh() };
            let tanh = u.tanh();
            (sigma * x_amp * sech, sigma * s_len * x_amp * freq * sech * tanh)
        }
    };
    let sy = s_len * x;
    let gamma = params.epsilon * params.g * params.g / (2.0 * params.omega0);
    let sz = blp.c_const + gamma * sy * sy;
    Ok(PhaseState::new(sx, sy, sz, -params.g * sy, 0.0))
}

fn validate_blp(params: &ModelParams, blp: &BoundLuminosityParams) -> Result<()> {
    check_regime_params(params)?;
    let bad = |what: &str| Err(Error::InvalidParams(format!("inconsistent bound-luminosity constants: {what}")));
    if blp.energy != -params.omega0 * blp.c_const {
        return bad("E != -omega0*C");
    }
    if !(blp.u_rate > 0.0) || !blp.u_rate.is_finite() {
        return bad("u_rate must be positive");
    }
    if !(0.0..=1.0).contains(&blp.m_eff) {
        return bad("m_eff outside [0, 1]");
    }
    if blp.eps_sign != params.eps_sign() {
        return bad("eps_sign does not match epsilon");
    }
    let expected_k = 2.0 / (1.0 + blp.eps_sign * blp.energy / (params.omega0 * params.spin_s));
    if (blp.k_param - expected_k).abs() > 1e-12 * expected_k.abs().max(1.0) {
        return bad("k does not match the energy");
    }
    Ok(())
}

/// Period of the full state. For libration this is twice the period of
/// `Sz`, because `Sy` reverses sign every half cycle.
pub fn bl_period(params: &ModelParams, blp: &BoundLuminosityParams) -> Result<f64> {
    validate_blp(params, blp)?;
    let quarter = match blp.regime {
        Regime::Separatrix => return Err(Error::InfinitePeriod),
        _ => ellint_k(blp.m_eff)? / blp.u_rate,
    };
    Ok(match blp.regime {
        Regime::Libration => 4.0 * quarter,
        _ => 2.0 * quarter,
    })
}

/// Period of `Sz(t)`: `2K(m)/u_rate` in both regimes.
pub fn sz_period(params: &ModelParams, blp: &BoundLuminosityParams) -> Result<f64> {
    validate_blp(params, blp)?;
    if blp.regime == Regime::Separatrix {
        return Err(Error::InfinitePeriod);
    }
    Ok(2.0 * ellint_k(blp.m_eff)? / blp.u_rate)
}

/// Dipole energy `E_dip = p·Sy = −g·Sy²` and Zeeman energy `E_Z = −ω₀·Sz`.
pub fn bl_energies(params: &ModelParams, blp: &BoundLuminosityParams, t: f64) -> Result<(f64, f64)> {
    let state = bl_state(params, blp, t)?;
    Ok((state.p * state.sy, -params.omega0 * state.sz))
}

/// Effective quartic potential for `x = Sy/S` (particle of mass `1/ω₀`):
///
/// ```text
/// U = (ω₀/8)(g/g_c)⁴x⁴ + (ω₀/2)(1 + (g/g_c)²·sign(ε)·C/S)·x²
/// ```
pub fn quartic_potential(params: &ModelParams, c_const: f64, x: f64) -> f64 {
    let rho_sq = coupling_ratio_sq(params);
    let x2 = x * x;
    let quadratic = 1.0 + rho_sq * params.eps_sign() * c_const / params.spin_s;
    params.omega0 / 8.0 * rho_sq * rho_sq * x2 * x2 + params.omega0 / 2.0 * quadratic * x2
}

/// Quadratic coefficient of [`quartic_potential`] is negative:
/// `sign(ε)·C < −(g_c²/g²)·S`.
pub fn is_double_well(params: &ModelParams, c_const: f64) -> bool {
    let gc = critical_coupling(params);
    if !gc.is_finite() || params.g == 0.0 {
        return false;
    }
    params.eps_sign() * c_const < -(gc * gc) / (params.g * params.g) * params.spin_s
}

/// Positive location of the quartic minima, if the potential is a double well.
pub fn quartic_minimum(params: &ModelParams, c_const: f64) -> Option<f64> {
    if !is_double_well(params, c_const) {
        return None;
    }
    let rho_sq = coupling_ratio_sq(params);
    let quadratic = 1.0 + rho_sq * params.eps_sign() * c_const / params.spin_s;
    Some((-2.0 * quadratic / (rho_sq * rho_sq)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reduced_energy, spin_norm};

    fn params(eps: f64, ratio: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0, eps, 1.0).unwrap().with_coupling_ratio(ratio).unwrap()
    }

    #[test]
    fn south_pole_is_the_separatrix() {
        let p = params(1.0, 1.5);
        let blp = bl_constants(&p, &Spin::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(blp.c_const, -1.0);
        assert_eq!(blp.energy, 1.0);
        assert_eq!(blp.k_param, 1.0);
        assert_eq!(blp.regime, Regime::Separatrix);
        // on the pole itself the orbit never leaves
        let s = bl_state(&p, &blp, 3.0).unwrap();
        assert!((s.sz + 1.0).abs() < 1e-15 && s.sy == 0.0);
    }

    #[test]
    fn north_pole_is_degenerate() {
        let p = params(1.0, 1.5);
        let err = bl_constants(&p, &Spin::new(0.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn formula_example() {
        let p = ModelParams::new(1.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        let blp = bl_constants(&p, &Spin::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(blp.c_const, -2.0);
        assert_eq!(blp.energy, 2.0);
        assert!((blp.k_param - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(blp.regime, Regime::Rotation);
    }

    #[test]
    fn refuses_free_spin_and_off_sphere() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(bl_constants(&p, &Spin::new(0.0, 1.0, 0.0)), Err(Error::NoBoundRegime)));
        let p = params(1.0, 1.2);
        assert!(matches!(bl_constants(&p, &Spin::new(0.0, 0.5, 0.0)), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn state_at_zero_reproduces_initial_spin() {
        for eps in [1.0, -1.0, 0.4] {
            let p = params(eps, 1.3);
            for spin in [
                Spin::new(0.6, 0.0, -0.8),
                Spin::new(-0.3, 0.5, 0.6_f64.sqrt()),
                Spin::new(0.2, -0.9, -(0.15_f64).sqrt()),
                Spin::new(0.0, 1.0, 0.0),
            ] {
                let spin = spin.rescaled(1.0);
                let blp = bl_constants(&p, &spin).unwrap();
                let s = bl_state(&p, &blp, 0.0).unwrap();
                assert!((s.sx - spin.sx).abs() < 1e-10, "{eps} {spin:?} {s:?}");
                assert!((s.sy - spin.sy).abs() < 1e-10, "{eps} {spin:?} {s:?}");
                assert!((s.sz - spin.sz).abs() < 1e-10, "{eps} {spin:?} {s:?}");
            }
        }
    }

    #[test]
    fn canonical_start_is_extremum_of_sz() {
        for eps in [1.0, -1.0] {
            let p = params(eps, 1.4);
            for e in [0.3, 0.9, 1.1] {
                let energy = eps.signum() * e;
                let blp = bl_canonical(&p, energy).unwrap();
                let t_period = sz_period(&p, &blp).unwrap();
                let z0 = eps.signum() * bl_state(&p, &blp, 0.0).unwrap().sz;
                for i in 1..200 {
                    let z = eps.signum() * bl_state(&p, &blp, t_period * i as f64 / 200.0).unwrap().sz;
                    assert!(z >= z0 - 1e-12, "{eps} {e}: {z} < {z0}");
                }
            }
        }
    }

    #[test]
    fn canonical_start_approaches_pole_near_separatrix() {
        let p = params(1.0, 1.5);
        let below = bl_state(&p, &bl_canonical(&p, 1.0 - 1e-9).unwrap(), 0.0).unwrap();
        let above = bl_state(&p, &bl_canonical(&p, 1.0 + 1e-9).unwrap(), 0.0).unwrap();
        assert!((below.sz + 1.0).abs() < 1e-4);
        assert!((above.sz + 1.0).abs() < 1e-4);
        // ε < 0 mirrors the picture to the north pole
        let p = params(-1.0, 1.5);
        let s = bl_state(&p, &bl_canonical(&p, -1.0 + 1e-9).unwrap(), 0.0).unwrap();
        assert!((s.sz - 1.0).abs() < 1e-4);
    }

    #[test]
    fn conservation_along_orbit() {
        for eps in [1.0, -0.5] {
            let p = params(eps, 1.7);
            for e in [0.2, 0.95, 1.3] {
                let blp = bl_canonical(&p, eps.signum() * e).unwrap();
                for i in 0..100 {
                    let t = 0.37 * i as f64;
                    let s = bl_state(&p, &blp, t).unwrap();
                    assert!((spin_norm(&s) - 1.0).abs() < 1e-10);
                    assert!((reduced_energy(&p, &s.spin()) - blp.energy).abs() < 1e-10);
                    assert!(s.sz.abs() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn periodicity() {
        let p = params(1.0, 1.2);
        for e in [0.5, 1.05] {
            let blp = bl_canonical(&p, e).unwrap();
            let period = bl_period(&p, &blp).unwrap();
            for t in [0.0, 0.3, 2.9] {
                let a = bl_state(&p, &blp, t).unwrap();
                let b = bl_state(&p, &blp, t + period).unwrap();
                assert!((a.sx - b.sx).abs() < 1e-9);
                assert!((a.sy - b.sy).abs() < 1e-9);
                assert!((a.sz - b.sz).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn separatrix_has_no_period() {
        let p = params(1.0, 1.5);
        let blp = bl_canonical(&p, 1.0).unwrap();
        assert_eq!(blp.regime, Regime::Separatrix);
        assert!(matches!(bl_period(&p, &blp), Err(Error::InfinitePeriod)));
    }

    #[test]
    fn sign_symmetry_in_epsilon() {
        let plus = params(1.0, 1.3);
        let minus = params(-1.0, 1.3);
        for e in [0.4, 1.1] {
            let a = bl_canonical(&plus, e).unwrap();
            let b = bl_canonical(&minus, -e).unwrap();
            for i in 0..50 {
                let t = 0.21 * i as f64;
                let sa = bl_state(&plus, &a, t).unwrap();
                let sb = bl_state(&minus, &b, t).unwrap();
                assert!((sa.sz + sb.sz).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn libration_stays_below_pole() {
        let p = params(1.0, 1.6);
        let blp = bl_canonical(&p, 0.7).unwrap();
        assert_eq!(blp.regime, Regime::Libration);
        assert!(blp.k_param > 1.0);
        let t_period = bl_period(&p, &blp).unwrap();
        let max_sz =
            (0..2000).map(|i| bl_state(&p, &blp, t_period * i as f64 / 2000.0).unwrap().sz).fold(f64::MIN, f64::max);
        assert!(max_sz < 1.0 - 1e-6);
    }

    #[test]
    fn dipole_and_zeeman_energies() {
        let p = params(1.0, 1.4);
        let blp = bl_canonical(&p, 0.6).unwrap();
        // canonical libration start has Sy = 0
        let (e_dip, e_z) = bl_energies(&p, &blp, 0.0).unwrap();
        assert!(e_dip.abs() < 1e-30);
        assert!((e_z - blp.energy).abs() < 1e-14);
        for i in 0..40 {
            let (e_dip, e_z) = bl_energies(&p, &blp, 0.17 * i as f64).unwrap();
            assert!(e_dip <= 0.0);
            // E_Z − E = (εg/2)·E_dip
            let lhs = e_z - blp.energy;
            let rhs = 0.5 * p.epsilon * p.g * e_dip;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_examples() {
        let p = params(1.0, 1.0);
        assert_eq!(quartic_potential(&p, -0.3, 0.0), 0.0);
        for x in [0.1, 0.7, 1.9] {
            assert_eq!(quartic_potential(&p, -0.3, x), quartic_potential(&p, -0.3, -x));
        }
        // g = g_c, C = −2S: U = ω₀x⁴/8 − ω₀x²/2 with minima at ±√2
        let xm = quartic_minimum(&p, -2.0).unwrap();
        assert!((xm - 2.0_f64.sqrt()).abs() < 1e-15);
        let u = |x: f64| quartic_potential(&p, -2.0, x);
        assert!(u(xm) < u(xm - 1e-4) && u(xm) < u(xm + 1e-4));
    }

    #[test]
    fn double_well_boundary() {
        let p = params(1.0, 1.3);
        assert!(!is_double_well(&p, 0.0));
        let gc = critical_coupling(&p);
        let boundary = -(gc * gc) / (p.g * p.g) * p.spin_s;
        assert!(!is_double_well(&p, boundary));
        assert!(is_double_well(&p, boundary - 1e-9));
    }
}
