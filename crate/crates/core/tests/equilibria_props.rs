use std::f64::consts::PI;

use dicke_dyn::equilibria::{effective_potential_u, fixed_points, order_parameter, FixedPointKind, Stability};
use dicke_dyn::{critical_coupling, eom_rhs, ModelParams};
use proptest::prelude::*;

fn params(eps: f64, g: f64) -> ModelParams {
    ModelParams::new(1.0, 1.0, g, eps, 1.0).unwrap()
}

/// Golden-section minimisation of `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    while (b - a).abs() > 1e-10 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    0.5 * (a + b)
}

/// Classification of an extremum at `gamma` by comparing with the local
/// minimiser and maximiser of `U` in a small bracket.
fn oracle_stability(p: &ModelParams, gamma: f64) -> Stability {
    let w = 0.05;
    let u = |x: f64| effective_potential_u(p, x);
    let min = golden_min(u, gamma - w, gamma + w);
    let max = golden_min(|x| -u(x), gamma - w, gamma + w);
    let at_min = (min - gamma).abs() < 1e-6;
    let at_max = (max - gamma).abs() < 1e-6;
    match (at_min, at_max) {
        (true, false) => Stability::Minimum,
        (false, true) => Stability::Maximum,
        _ => Stability::Degenerate,
    }
}

#[test]
fn stability_agrees_with_direct_minimisation() {
    let mut checked = 0;
    for eps in [-1.0, -0.5, 0.5, 1.0] {
        let gc = critical_coupling(&params(eps, 1.0));
        for ratio in [0.3, 0.7, 1.3, 2.0, 3.0] {
            let p = params(eps, ratio * gc);
            for fp in fixed_points(&p) {
                assert_eq!(fp.stability, oracle_stability(&p, fp.gamma), "eps {eps} ratio {ratio} {:?}", fp.kind);
                checked += 1;
            }
        }
    }
    assert!(checked >= 40);
}

#[test]
fn tilted_minimum_lies_below_pole_for_negative_eps() {
    let p = params(-1.0, 2.0);
    let u = |x: f64| effective_potential_u(&p, x);
    let gamma = golden_min(u, 0.0, PI);
    let expected = (-p.omega0 / (p.epsilon * p.g * p.g * p.spin_s)).acos();
    assert!((gamma - expected).abs() < 1e-6);
    assert!(u(gamma) < u(0.0));
}

#[test]
fn existence_boundary_in_fine_sweep() {
    for eps in [-1.0, 0.5] {
        let gc = critical_coupling(&params(eps, 1.0));
        let mut appeared = None;
        for i in 0..=1000 {
            let g = gc * (0.5 + 1e-3 * i as f64);
            let p = params(eps, g);
            let eg2 = eps * g * g;
            let positive = p.spin_s * p.spin_s - p.omega0 * p.omega0 / (eg2 * eg2) > 0.0;
            let n = fixed_points(&p).len();
            assert_eq!(n == 4, positive, "g = {g}");
            if n == 4 && appeared.is_none() {
                appeared = Some(i);
            }
        }
        let first = appeared.unwrap();
        assert!((499..=501).contains(&first), "{first}");
    }
}

#[test]
fn zero_eps_has_no_threshold() {
    let p = params(0.0, 5.0);
    assert!(critical_coupling(&p).is_infinite());
    assert_eq!(order_parameter(&p), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3000))]

    #[test]
    fn residuals_vanish(eps in -3.0f64..3.0, g in 0.0f64..5.0, omega0 in 0.2f64..3.0, s in 0.2f64..4.0) {
        let p = ModelParams::new(1.3, omega0, g, eps, s).unwrap();
        for fp in fixed_points(&p) {
            let scale = 1.0f64.max(omega0 * s).max(g * g * s * s);
            prop_assert!(eom_rhs(&p, &fp.state).max_abs() < 1e-12 * scale);
            if fp.kind.is_superradiant() {
                prop_assert_eq!(fp.state.p, -p.g * fp.state.sy);
                prop_assert!((fp.state.sy.abs() - order_parameter(&p)).abs() < 1e-12);
                prop_assert!(p.g > critical_coupling(&p) * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn poles_always_present(eps in -3.0f64..3.0, g in 0.0f64..5.0) {
        let points = fixed_points(&params(eps, g));
        prop_assert_eq!(points[0].kind, FixedPointKind::PolePlus);
        prop_assert_eq!(points[1].kind, FixedPointKind::PoleMinus);
    }

    #[test]
    fn order_parameter_curve(eps in prop_oneof![-3.0f64..-0.05, 0.05f64..3.0], ratio in 0.0f64..5.0) {
        let gc = critical_coupling(&params(eps, 1.0));
        let p = params(eps, ratio * gc);
        let expected = if p.g > gc { (1.0 - (gc / p.g).powi(4)).max(0.0).sqrt() } else { 0.0 };
        prop_assert!((order_parameter(&p) - expected).abs() < 1e-7);
    }
}
