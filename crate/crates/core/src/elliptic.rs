//! Elliptic integral of the first kind and Jacobi elliptic functions.
//!
//! The second argument of every routine is the *parameter* `m` (not the
//! modulus `k = √m`). Direct evaluation accepts `0 ≤ m ≤ 1`; the reciprocal
//! transform covers `m > 1`:
//!
//! ```text
//! sn(u|m) = sn(√m·u | 1/m)/√m,  cn(u|m) = dn(√m·u | 1/m),  dn(u|m) = cn(√m·u | 1/m)
//! ```
//!
//! Everything is built on the arithmetic-geometric mean. The descending
//! Landen sequence stops once the modulus `c_n/a_n` drops below 1e-14, and
//! the separatrix `|1 − m| < 1e-12` uses the tanh/sech closed forms.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Landen descent stops when `c_n / a_n` falls below this.
const MODULUS_TOL: f64 = 1e-14;
/// Distance from m = 1 below which the closed forms are used.
const SEPARATRIX_TOL: f64 = 1e-12;
const MAX_LANDEN: usize = 40;

/// `(sn, cn, dn)` at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

fn check_parameter(m: f64) -> Result<()> {
    if (0.0..=1.0).contains(&m) {
        Ok(())
    } else {
        Err(Error::ParameterDomain { m })
    }
}

fn near_separatrix(m: f64) -> bool {
    (1.0 - m).abs() < SEPARATRIX_TOL
}

/// Arithmetic-geometric mean of two non-negative numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_LANDEN {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    a
}

/// Complete elliptic integral of the first kind, `K(m) = π / (2·AGM(1, √(1−m)))`.
pub fn ellint_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    if m == 1.0 {
        return Err(Error::Divergent);
    }
    Ok(FRAC_PI_2 / agm(1.0, (1.0 - m).sqrt()))
}

/// Incomplete elliptic integral of the first kind,
/// `F(φ|m) = ∫₀^φ dθ / √(1 − m·sin²θ)`.
///
/// Arguments are reduced to `|φ| ≤ π/2` with `F(φ + nπ) = F(φ) + 2nK`.
/// At `m = 1` the integral is `asinh(tan φ)` inside `|φ| < π/2` and
/// infinite beyond.
pub fn ellint_f(phi: f64, m: f64) -> Result<f64> {
    check_parameter(m)?;
    if !phi.is_finite() {
        return Ok(phi);
    }
    let n = (phi / PI).round();
    let r = phi - n * PI;
    if m == 1.0 {
        if n != 0.0 {
            return Ok(f64::INFINITY.copysign(phi));
        }
        return Ok(r.tan().asinh());
    }
    let base = incomplete_landen(r, m);
    if n == 0.0 {
        return Ok(base);
    }
    Ok(2.0 * n * ellint_k(m)? + base)
}

/// Ascending-amplitude AGM scheme for `|φ| ≤ π/2`, `0 ≤ m < 1`.
fn incomplete_landen(phi: f64, m: f64) -> f64 {
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    let mut c = m.sqrt();
    let mut amp = phi;
    let mut scale = 1.0;
    let mut iter = 0;
    while c > MODULUS_TOL * a && iter < MAX_LANDEN {
        // tan(φₙ₊₁ − φₙ) = (bₙ/aₙ)·tan φₙ, on the branch continuous in φₙ
        let psi = (b * amp.sin()).atan2(a * amp.cos());
        let wrap = ((amp - psi) / (2.0 * PI)).round() * 2.0 * PI;
        amp += psi + wrap;
        c = 0.5 * (a - b);
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        scale *= 2.0;
        iter += 1;
    }
    amp / (scale * a)
}

/// Amplitude `am(u|m)` by the descending Landen sequence.
fn landen_amplitude(u: f64, m: f64) -> f64 {
    let mut a = [0.0; MAX_LANDEN + 1];
    let mut c = [0.0; MAX_LANDEN + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut n = 0;
    while c[n] > MODULUS_TOL * a[n] && n < MAX_LANDEN {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = 2.0_f64.powi(n as i32) * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    phi
}

/// Jacobi amplitude `am(u|m)`, the inverse of `F(·|m)`.
pub fn jacobi_am(u: f64, m: f64) -> Result<f64> {
    check_parameter(m)?;
    if near_separatrix(m) {
        // Gudermannian
        return Ok((u.sinh()).atan());
    }
    let (shift, r) = reduce_by_half_period(u, m)?;
    Ok(shift * PI + landen_amplitude(r, m))
}

/// Reduce `u` modulo `2K`; returns `(n, u − 2nK)`.
fn reduce_by_half_period(u: f64, m: f64) -> Result<(f64, f64)> {
    let two_k = 2.0 * ellint_k(m)?;
    if !u.is_finite() || u.abs() <= two_k {
        return Ok((0.0, u));
    }
    let n = (u / two_k).round();
    Ok((n, u - n * two_k))
}

/// `(sn, cn, dn)` for `0 ≤ m ≤ 1`.
pub fn jacobi_sn_cn_dn(u: f64, m: f64) -> Result<JacobiTriple> {
    check_parameter(m)?;
    if near_separatrix(m) {
        let sech = 1.0 / u.cosh();
        return Ok(JacobiTriple { sn: u.tanh(), cn: sech, dn: sech });
    }
    let (n, r) = reduce_by_half_period(u, m)?;
    let phi = landen_amplitude(r, m);
    // shifting u by 2K flips sn and cn, dn is unchanged
    let flip = if n.rem_euclid(2.0) == 1.0 { -1.0 } else { 1.0 };
    let (sn, cn) = phi.sin_cos();
    // dn² = (1 − m) + m·cn², a sum of non-negative terms
    let dn = ((1.0 - m) + m * cn * cn).sqrt();
    Ok(JacobiTriple { sn: flip * sn, cn: flip * cn, dn })
}

/// Jacobi triple for `m > 1` via evaluation at `(√m·u, 1/m)`.
pub fn reciprocal_transform(u: f64, m: f64) -> Result<JacobiTriple> {
    if !(m > 1.0) || !m.is_finite() {
        return Err(Error::ReciprocalDomain { m });
    }
    let root = m.sqrt();
    let t = jacobi_sn_cn_dn(root * u, 1.0 / m)?;
    Ok(JacobiTriple { sn: t.sn / root, cn: t.dn, dn: t.cn })
}

/// Jacobi triple for any parameter `m ≥ 0`, dispatching to the reciprocal
/// transform above 1.
pub fn jacobi(u: f64, m: f64) -> Result<JacobiTriple> {
    if m > 1.0 && !near_separatrix(m) {
        reciprocal_transform(u, m)
    } else {
        jacobi_sn_cn_dn(u, m.min(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_errors() {
        assert!(matches!(ellint_f(0.3, 1.2), Err(Error::ParameterDomain { .. })));
        assert!(matches!(ellint_f(0.3, -0.1), Err(Error::ParameterDomain { .. })));
        assert!(matches!(ellint_k(1.0), Err(Error::Divergent)));
        assert!(matches!(ellint_k(1.5), Err(Error::ParameterDomain { .. })));
        assert!(matches!(jacobi_am(0.3, 2.0), Err(Error::ParameterDomain { .. })));
        assert!(matches!(jacobi_sn_cn_dn(0.3, -1.0), Err(Error::ParameterDomain { .. })));
        assert!(matches!(reciprocal_transform(0.3, 1.0), Err(Error::ReciprocalDomain { .. })));
        assert!(matches!(reciprocal_transform(0.3, 0.5), Err(Error::ReciprocalDomain { .. })));
        let msg = ellint_f(0.3, 1.2).unwrap_err().to_string();
        assert!(msg.contains("reciprocal"), "{msg}");
    }

    #[test]
    fn trivial_parameter_zero() {
        for x in [-7.0, -1.0, 0.0, 0.4, 3.0, 25.0] {
            assert!((ellint_f(x, 0.0).unwrap() - x).abs() < 1e-14 * x.abs().max(1.0));
            assert!((jacobi_am(x, 0.0).unwrap() - x).abs() < 1e-14 * x.abs().max(1.0));
            let t = jacobi_sn_cn_dn(x, 0.0).unwrap();
            assert!((t.sn - x.sin()).abs() < 1e-14);
            assert!((t.cn - x.cos()).abs() < 1e-14);
            assert_eq!(t.dn, 1.0);
        }
        assert_eq!(ellint_k(0.0).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn separatrix_closed_forms() {
        for u in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            let t = jacobi_sn_cn_dn(u, 1.0).unwrap();
            assert!((t.sn - f64::tanh(u)).abs() < 1e-15);
            assert!((t.cn - 1.0 / f64::cosh(u)).abs() < 1e-15);
            assert!((t.dn - 1.0 / f64::cosh(u)).abs() < 1e-15);
        }
        assert!(ellint_f(FRAC_PI_2 + 0.1, 1.0).unwrap().is_infinite());
        assert!((ellint_f(0.5, 1.0).unwrap() - f64::atanh(f64::sin(0.5))).abs() < 1e-15);
    }

    #[test]
    fn complete_integral_is_f_at_quarter_period() {
        for m in [0.0, 0.2, 0.5, 0.9, 0.999] {
            let k = ellint_k(m).unwrap();
            assert!((ellint_f(FRAC_PI_2, m).unwrap() - k).abs() < 1e-13 * k);
        }
    }

    #[test]
    fn k_monotone() {
        let mut last = 0.0;
        for i in 0..1000 {
            let m = i as f64 / 1000.0;
            let k = ellint_k(m).unwrap();
            assert!(k > last);
            last = k;
        }
    }

    #[test]
    fn f_is_odd_and_quasiperiodic() {
        for m in [0.1, 0.5, 0.95] {
            let k = ellint_k(m).unwrap();
            for phi in [0.1, 0.9, 1.4, 2.8, 7.7, 30.0] {
                let f = ellint_f(phi, m).unwrap();
                assert_eq!(ellint_f(-phi, m).unwrap(), -f);
                let shifted = ellint_f(phi + PI, m).unwrap();
                assert!((shifted - f - 2.0 * k).abs() < 1e-12 * shifted.abs().max(1.0));
            }
        }
    }

    #[test]
    fn amplitude_round_trip() {
        let phi = 0.7;
        let u = ellint_f(phi, 0.3).unwrap();
        assert!((jacobi_am(u, 0.3).unwrap() - phi).abs() < 1e-10);
        assert_eq!(jacobi_am(0.0, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn amplitude_is_unbounded() {
        let m = 0.8;
        let k = ellint_k(m).unwrap();
        let am = jacobi_am(20.0 * k + 0.3, m).unwrap();
        assert!((am - 10.0 * PI - jacobi_am(0.3, m).unwrap()).abs() < 1e-11);
    }

    #[test]
    fn reciprocal_at_zero_and_continuity() {
        for m in [1.01, 2.0, 3.7] {
            let t = reciprocal_transform(0.0, m).unwrap();
            assert_eq!(t.cn, 1.0);
            assert_eq!(t.sn, 0.0);
        }
        for u in [0.3, 1.5, 4.0] {
            let below = jacobi(u, 1.0 - 1e-9).unwrap();
            let above = jacobi(u, 1.0 + 1e-9).unwrap();
            let sech = 1.0 / f64::cosh(u);
            assert!((below.cn - sech).abs() < 1e-7);
            assert!((above.cn - sech).abs() < 1e-7);
        }
    }

    #[test]
    fn half_period_shift_flips_sign() {
        let m = 0.6;
        let k = ellint_k(m).unwrap();
        let a = jacobi_sn_cn_dn(0.4, m).unwrap();
        let b = jacobi_sn_cn_dn(0.4 + 2.0 * k, m).unwrap();
        assert!((a.sn + b.sn).abs() < 1e-14);
        assert!((a.cn + b.cn).abs() < 1e-14);
        assert!((a.dn - b.dn).abs() < 1e-14);
    }
}
