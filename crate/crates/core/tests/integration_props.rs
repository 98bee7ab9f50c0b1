use dicke_dyn::dynamics::{
    conservation_report, find_crossings, integrate, integrate_reduced, solve, Direction, IntegratorConfig, StepControl,
};
use dicke_dyn::poincare::sample_on_shell;
use dicke_dyn::{eom_rhs, hamiltonian, reduced_eom_rhs, ModelParams, PhaseState, Spin};

fn params(eps: f64, g: f64) -> ModelParams {
    ModelParams::new(1.0, 1.0, g, eps, 1.0).unwrap()
}

fn config(rel_tol: f64, t_end: f64) -> IntegratorConfig {
    IntegratorConfig { rel_tol, abs_tol: rel_tol * 1e-2, t_end, sample_dt: 0.5, ..Default::default() }
}

#[test]
fn energy_drift_over_long_horizon() {
    for (eps, g, energy) in [(-0.5, 1.2, 1.0), (1.0, 1.8, 2.0), (0.3, 0.6, -0.4)] {
        let p = params(eps, g);
        for (i, s0) in sample_on_shell(&p, energy, 4, 11).unwrap().iter().enumerate() {
            let traj = integrate(&p, s0, &config(1e-10, 1e3)).unwrap();
            let r = conservation_report(&p, &traj).unwrap();
            assert!(r.energy_drift < 1e-8, "{eps} {g} #{i}: {r:?}");
            assert!(r.spin_drift < 1e-8, "{eps} {g} #{i}: {r:?}");
            assert_eq!(r.energy_drift, traj.stats.max_energy_drift);
        }
    }
}

#[test]
fn reduced_flow_keeps_spin_length() {
    let p = params(-0.8, 1.6);
    let s0 = Spin::new(0.3, 0.4, -(0.75_f64).sqrt());
    let traj = integrate_reduced(&p, &s0, &config(1e-10, 1e3)).unwrap();
    let r = conservation_report(&p, &traj).unwrap();
    assert!(r.spin_drift < 1e-9, "{r:?}");
    assert!(r.energy_drift < 1e-9, "{r:?}");
}

#[test]
fn poles_are_constant_under_reduced_flow() {
    let p = params(0.7, 1.4);
    for sz in [1.0, -1.0] {
        let traj = integrate_reduced(&p, &Spin::new(0.0, 0.0, sz), &config(1e-8, 50.0)).unwrap();
        assert!(traj.states.iter().all(|s| *s == Spin::new(0.0, 0.0, sz)));
    }
}

#[test]
fn drift_grows_with_tolerance() {
    let p = params(-0.5, 1.5);
    let s0 = sample_on_shell(&p, 1.0, 1, 3).unwrap()[0];
    let drifts: Vec<f64> = [1e-10, 1e-8, 1e-6]
        .iter()
        // no step cap, so the tolerance alone sets the step
        .map(|&tol| IntegratorConfig { max_step: 10.0, ..config(tol, 200.0) })
        .map(|cfg| conservation_report(&p, &integrate(&p, &s0, &cfg).unwrap()).unwrap().energy_drift)
        .collect();
    assert!(drifts[0] < drifts[1] && drifts[1] < drifts[2], "{drifts:?}");
}

fn endpoint(p: &ModelParams, s0: &PhaseState, ctl: &StepControl, t_end: f64) -> [f64; 5] {
    let mut end = s0.to_array();
    solve(
        |_, y: &[f64; 5]| eom_rhs(p, &PhaseState::from_array(*y)).to_array(),
        0.0,
        s0.to_array(),
        t_end,
        ctl,
        |d, y| {
            if d.last {
                end = *y;
            }
            true
        },
    )
    .unwrap();
    end
}

fn distance(a: &[f64; 5], b: &[f64; 5]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn halving_the_step_cuts_the_error_by_far_more_than_four() {
    let p = params(-0.5, 1.2);
    let s0 = PhaseState::new(0.6, 0.0, 0.8, 0.3, -0.2);
    let reference = endpoint(&p, &s0, &StepControl { rel_tol: 1e-14, abs_tol: 1e-16, max_step: 0.01 }, 20.0);
    // with a loose tolerance every step is capped by max_step
    let err = |h: f64| {
        distance(&endpoint(&p, &s0, &StepControl { rel_tol: 1e-2, abs_tol: 1e-2, max_step: h }, 20.0), &reference)
    };
    let coarse = err(0.4);
    let fine = err(0.2);
    assert!(coarse / fine >= 4.0, "{coarse} / {fine}");
}

#[test]
fn tighter_tolerance_reduces_endpoint_error() {
    let p = params(-0.5, 1.2);
    let s0 = PhaseState::new(0.6, 0.0, 0.8, 0.3, -0.2);
    let reference = endpoint(&p, &s0, &StepControl { rel_tol: 1e-14, abs_tol: 1e-16, max_step: 0.05 }, 50.0);
    let err = |tol: f64| {
        distance(&endpoint(&p, &s0, &StepControl { rel_tol: tol, abs_tol: tol, max_step: 10.0 }, 50.0), &reference)
    };
    let errors: Vec<f64> = [1e-5, 1e-6, 1e-7, 1e-8].iter().map(|&t| err(t)).collect();
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= 4.0, "{errors:?}");
    }
}

#[test]
fn reduced_flow_is_time_reversible() {
    let p = params(1.0, 1.5);
    let spin0 = Spin::new(0.48, 0.6, 0.64);
    let ctl = StepControl { rel_tol: 1e-10, abs_tol: 1e-12, max_step: 0.5 };
    let run = |sign: f64, y0: [f64; 3]| {
        let mut end = y0;
        solve(
            |_, y: &[f64; 3]| {
                let v = reduced_eom_rhs(&p, &Spin::new(y[0], y[1], y[2]));
                [sign * v.sx, sign * v.sy, sign * v.sz]
            },
            0.0,
            y0,
            25.0,
            &ctl,
            |d, y| {
                if d.last {
                    end = *y;
                }
                true
            },
        )
        .unwrap();
        end
    };
    let forward = run(1.0, [spin0.sx, spin0.sy, spin0.sz]);
    let back = run(-1.0, forward);
    let bound = 10.0 * (ctl.abs_tol + ctl.rel_tol * p.spin_s);
    for (a, b) in back.iter().zip([spin0.sx, spin0.sy, spin0.sz]) {
        assert!((a - b).abs() < bound, "{back:?}");
    }
}

#[test]
fn crossings_lie_on_the_energy_surface() {
    let p = params(-0.5, 1.4);
    let s0 = sample_on_shell(&p, 1.0, 1, 5).unwrap()[0];
    let cfg = config(1e-10, 300.0);
    let traj = integrate(&p, &s0, &cfg).unwrap();
    let drift = traj.stats.max_energy_drift * hamiltonian(&p, &s0).abs();
    let crossings = find_crossings(&p, &s0, &cfg, Direction::Both).unwrap();
    assert!(crossings.len() > 20);
    for c in &crossings {
        assert!(c.state.q.abs() < 1e-10 * c.state.euclidean_norm().max(1.0));
        assert!((hamiltonian(&p, &c.state) - 1.0).abs() < 10.0 * drift.max(1e-12));
    }
    // directions alternate along a single trajectory
    let ups = find_crossings(&p, &s0, &cfg, Direction::Up).unwrap().len();
    let downs = find_crossings(&p, &s0, &cfg, Direction::Down).unwrap().len();
    assert_eq!(ups + downs, crossings.len());
    assert!(ups.abs_diff(downs) <= 1);
}

#[test]
fn bit_identical_reruns() {
    let p = params(-0.5, 1.4);
    let s0 = sample_on_shell(&p, 1.0, 1, 9).unwrap()[0];
    let a = integrate(&p, &s0, &config(1e-9, 100.0)).unwrap();
    let b = integrate(&p, &s0, &config(1e-9, 100.0)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn horizon_is_reached_exactly() {
    let p = params(0.4, 0.9);
    let traj = integrate(&p, &PhaseState::new(0.0, 0.6, 0.8, 0.0, 0.1), &config(1e-9, 7.3)).unwrap();
    assert_eq!(traj.last().unwrap().0, 7.3);
}
