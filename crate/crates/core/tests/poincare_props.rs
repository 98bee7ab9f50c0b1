use dicke_dyn::dynamics::Direction;
use dicke_dyn::poincare::{
    chaotic_fraction, lyapunov_exponent, poincare_section, section_scores, LyapunovConfig, RegularityConfig,
    SectionConfig,
};
use dicke_dyn::{critical_coupling, hamiltonian, ModelParams, PhaseState};

fn params(eps: f64, ratio: f64) -> ModelParams {
    let base = ModelParams::new(1.0, 1.0, 1.0, eps, 1.0).unwrap();
    base.with_coupling(ratio * critical_coupling(&base))
}

fn section(energy: f64, n: usize, crossings: usize, t_end: f64, seed: u64) -> SectionConfig {
    let mut cfg = SectionConfig { energy, n_trajectories: n, n_crossings: crossings, seed, ..Default::default() };
    cfg.integrator.t_end = t_end;
    cfg
}

/// Ranks with ties sharing their mean rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let mean = 0.5 * (i + j) as f64;
        for k in i..=j {
            out[idx[k]] = mean;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn same_points_on_any_thread_count() {
    let p = params(-0.5, 1.0);
    let cfg = section(1.0, 6, 200, 4e3, 17);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| poincare_section(&p, &cfg).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    for (i, s) in one.iter().enumerate() {
        assert_eq!(s.traj_id, i);
        assert!(s.points.iter().all(|pt| pt.traj_id == i));
    }
}

#[test]
fn section_points_are_on_the_surface() {
    for (eps, energy, ratio) in [(-0.5, 1.0, 1.4), (1.0, 2.0, 1.0)] {
        let p = params(eps, ratio);
        let mut cfg = section(energy, 4, 300, 6e3, 3);
        cfg.direction = Direction::Both;
        for s in poincare_section(&p, &cfg).unwrap() {
            assert!(s.error.is_none());
            assert_eq!(s.points.len(), 300);
            let drift = s.energy_drift.max(1e-13);
            for pt in &s.points {
                assert!(pt.state.q.abs() < 1e-10 * pt.state.euclidean_norm().max(1.0));
                assert!((hamiltonian(&p, &pt.state) - energy).abs() <= 10.0 * drift);
                assert!((0.0..=std::f64::consts::PI).contains(&pt.theta));
                assert!(pt.phi > -std::f64::consts::PI && pt.phi <= std::f64::consts::PI);
            }
            assert!(s.points.windows(2).all(|w| w[0].t < w[1].t));
        }
    }
}

#[test]
fn transient_skip_drops_leading_crossings() {
    let p = params(-0.5, 0.6);
    let full = poincare_section(&p, &section(1.0, 2, 50, 2e3, 5)).unwrap();
    let skipped = poincare_section(&p, &SectionConfig { transient_skip: 10, ..section(1.0, 2, 40, 2e3, 5) }).unwrap();
    for (a, b) in full.iter().zip(&skipped) {
        assert_eq!(&a.points[10..], &b.points[..]);
    }
}

#[test]
fn pole_below_threshold_does_not_separate() {
    let p = params(-0.5, 0.5);
    let pole = PhaseState::new(0.0, 0.0, 1.0, 0.0, 0.0);
    let r = lyapunov_exponent(&p, &pole, &LyapunovConfig { horizon: 1e4, ..Default::default() }).unwrap();
    assert!(r.lambda.abs() < 1e-3, "{}", r.lambda);
    assert!(!r.shell_warning);
}

#[test]
fn decoupled_flow_is_not_chaotic() {
    let p = ModelParams::new(1.0, 1.0, 0.0, -0.5, 1.0).unwrap();
    let state = PhaseState::new(0.6, 0.0, 0.8, 0.5, 0.3);
    let short = lyapunov_exponent(&p, &state, &LyapunovConfig { horizon: 1e3, ..Default::default() }).unwrap();
    let long = lyapunov_exponent(&p, &state, &LyapunovConfig { horizon: 1e4, ..Default::default() }).unwrap();
    // both factors are rotations here, so separations neither grow nor shrink
    assert!(short.lambda.abs() < 1e-6 && long.lambda.abs() < 1e-6, "{} {}", short.lambda, long.lambda);
    assert!(long.trace.windows(2).all(|w| w[0].0 < w[1].0));
}

#[test]
fn weak_coupling_sections_are_curves() {
    let p = params(-0.5, 0.01);
    let cfg = section(1.0, 10, 1000, 2e4, 1);
    let rc = RegularityConfig::default();
    let scores = section_scores(&poincare_section(&p, &cfg).unwrap(), &rc);
    for s in &scores {
        assert!(s.score().unwrap() < rc.chaos_threshold, "{scores:?}");
    }
}

#[test]
fn strong_coupling_sections_scatter() {
    let p = params(-0.5, 1.5);
    let rc = RegularityConfig::default();
    let scores = section_scores(&poincare_section(&p, &section(1.0, 10, 1000, 2e4, 1)).unwrap(), &rc);
    assert!(chaotic_fraction(&scores, &rc).unwrap() > 0.5, "{scores:?}");
}

#[test]
fn most_shell_samples_separate_above_threshold() {
    let p = params(-0.5, 1.5);
    let sections = poincare_section(&p, &section(1.0, 10, 1, 1e3, 2)).unwrap();
    let positive = sections
        .iter()
        .filter(|s| lyapunov_exponent(&p, &s.initial, &LyapunovConfig::default()).unwrap().lambda > 1e-2)
        .count();
    assert!(positive > 5, "{positive}");
}

#[test]
fn score_ranking_follows_lyapunov_ranking() {
    // a mixed batch: roughly half regular, half chaotic
    let p = params(1.0, 1.0);
    let sections = poincare_section(&p, &section(2.0, 20, 1000, 2e4, 7)).unwrap();
    let scores: Vec<f64> =
        section_scores(&sections, &RegularityConfig::default()).iter().map(|s| s.score().unwrap()).collect();
    let lambdas: Vec<f64> = sections
        .iter()
        .map(|s| lyapunov_exponent(&p, &s.initial, &LyapunovConfig::default()).unwrap().lambda)
        .collect();
    let rho = pearson(&ranks(&scores), &ranks(&lambdas));
    assert!(rho > 0.7, "{rho}");
}
