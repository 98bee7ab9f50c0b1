"""Smoke test for the dicke_dyn extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`
or `pip install ./crates/python`, then run `python python/smoke_test.py`.
"""

import math

import dicke_dyn as dd


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    base = dd.ModelParams(omega=1.0, omega0=1.0, g=1.0, epsilon=-0.5, spin_s=1.0)
    gc = base.critical_coupling()
    close(gc, math.sqrt(2.0), 1e-15)
    params = base.with_coupling_ratio(1.4)

    points = dd.fixed_points(params)
    assert len(points) == 4
    for fp in points:
        rhs = dd.eom_rhs(params, fp["state"]).to_list()
        assert max(abs(x) for x in rhs) < 1e-12, fp
    kinds = {fp["kind"]: fp["stability"] for fp in points}
    assert kinds["superradiant_plus"] == "minimum"
    close(dd.order_parameter(params), math.sqrt(1.0 - 1.4**-4), 1e-12)

    sn, cn, dn = dd.jacobi(0.7, 0.3)
    close(sn * sn + cn * cn, 1.0, 1e-14)
    close(dd.ellint_f(math.pi / 2, 0.3), dd.ellint_k(0.3), 1e-14)

    orbit = dd.BoundLuminosityOrbit.from_energy(params, -0.5)
    period = orbit.period()
    s0 = orbit.state(0.0)
    times, spins = dd.integrate_spin(params, s0.sx, s0.sy, s0.sz, t_end=2.0 * period, sample_dt=period / 50, rel_tol=1e-12, abs_tol=1e-14)
    worst = max(abs(orbit.state(t).sz - s[2]) for t, s in zip(times, spins))
    assert worst < 1e-6, worst

    states = dd.sample_on_shell(params, 1.0, 3, seed=1)
    for s in states:
        close(dd.hamiltonian(params, s), 1.0, 1e-10)
    times, traj = dd.integrate(params, states[0], t_end=50.0)
    e0 = dd.hamiltonian(params, traj[0])
    assert max(abs(dd.hamiltonian(params, s) - e0) for s in traj) < 1e-8

    sections = dd.poincare_section(params, 1.0, n_trajectories=2, n_crossings=100, seed=3, t_end=2000.0)
    assert len(sections) == 2 and all(len(s["points"]) > 0 for s in sections)
    frac = dd.chaotic_fraction_of([s["score"] for s in sections])
    assert frac is None or 0.0 <= frac <= 1.0

    lam = dd.lyapunov_exponent(params, states[0], horizon=500.0, seed=1)
    assert math.isfinite(lam)

    try:
        dd.ModelParams(omega=-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative omega accepted")

    print(f"ok: g_c = {gc:.6f}, orbit period {period:.4f} ({orbit.regime}), lambda(500) = {lam:.3e}")


if __name__ == "__main__":
    main()
