"""Closed-form frequency traces and the Nadir/RoCoF/steady-state metrics."""

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

import gridsync as gs

from conftest import make_grid, pipeline, random_prop_grid


def two_bus_sys(model="swing"):
    g = make_grid([1, 1], [1, 1], [(0, 1, 1.0)], r_inv=[1, 1], tau=[1, 1])
    return gs.extract_representative(g, model)


def scenario_for(sys, bus=0, mag=1.0):
    return gs.StepScenario.single_bus(bus, mag, sys.f)


def closed_trace_fn(sys, scenario):
    """Scalar-time closed-form trace for use inside an optimizer."""
    mach = sys.machine
    w_inf = gs.steady_state_frequency(sys, scenario)
    reg = gs.damping_regime(mach)
    assert reg.underdamped

    def fn(t):
        osc = (np.cos(reg.omega_d * t)
               + ((reg.gamma - reg.eta) / reg.omega_d) * np.sin(reg.omega_d * t))
        return w_inf * (1.0 - np.exp(-reg.eta * t) * osc)

    return fn


class TestTraces:
    def test_swing_closed_form(self):
        sys = two_bus_sys("swing")
        tr = gs.system_frequency_trace(sys, scenario_for(sys), t_end=2.0, dt=1e-3)
        assert tr.values[0] == 0.0
        idx = int(round(1.0 / 1e-3))
        assert tr.values[idx] == pytest.approx(0.5 * (1 - np.exp(-1)), abs=1e-12)

    def test_turbine_closed_form(self):
        # symmetric parameters: decay rate 1, damped frequency 1, and the
        # sine coefficient is (gamma - eta)/omega_d = -1
        sys = two_bus_sys("turbine")
        tr = gs.system_frequency_trace(sys, scenario_for(sys), t_end=3.0, dt=1e-3)
        t = tr.t
        expected = 0.25 * (1 - np.exp(-t) * (np.cos(t) - np.sin(t)))
        assert np.abs(tr.values - expected).max() < 1e-12
        # the trace must reach the Nadir closed form at its peak time
        res = gs.nadir(sys, scenario_for(sys))
        idx = int(round(res.time / tr.dt))
        assert tr.values[idx] == pytest.approx(res.value, rel=1e-6)

    def test_starts_at_rest(self):
        for model in ("swing", "turbine"):
            sys = two_bus_sys(model)
            tr = gs.system_frequency_trace(sys, scenario_for(sys), t_end=1.0)
            assert tr.values[0] == 0.0

    def test_independent_of_line_set(self):
        buses = dict(m=[1, 2, 3], d=[0.5, 1.0, 1.5])
        g1 = make_grid(**buses, lines=[(0, 1, 1.0), (1, 2, 1.0)])
        g2 = make_grid(**buses, lines=[(0, 2, 5.0), (1, 2, 0.3), (0, 1, 2.0)])
        s1 = gs.extract_representative(g1, "swing")
        s2 = gs.extract_representative(g2, "swing")
        u1 = gs.StepScenario.single_bus(1, -2.0, s1.f)
        u2 = gs.StepScenario.single_bus(1, -2.0, s2.f)
        t1 = gs.system_frequency_trace(s1, u1, t_end=5.0)
        t2 = gs.system_frequency_trace(s2, u2, t_end=5.0)
        assert np.array_equal(t1.values, t2.values)

    def test_overdamped_falls_back_to_integration(self):
        # slow real pole at about -0.02, so give the tail room to decay
        g = make_grid([100, 100], [1, 1], [(0, 1, 1.0)], r_inv=[1, 1], tau=[1, 1])
        sys = gs.extract_representative(g, "turbine")
        assert not gs.damping_regime(sys.machine).underdamped
        tr = gs.system_frequency_trace(sys, scenario_for(sys), t_end=700.0, dt=1e-2)
        w_inf = gs.steady_state_frequency(sys, scenario_for(sys))
        assert tr.values[-1] == pytest.approx(w_inf, rel=1e-4)
        assert np.abs(tr.values).max() <= abs(w_inf) * (1 + 1e-9)  # no overshoot


class TestSteadyState:
    def test_swing_ratio(self):
        sys = two_bus_sys("swing")
        assert gs.steady_state_frequency(sys, scenario_for(sys)) == pytest.approx(0.5)

    def test_turbine_ratio(self):
        sys = two_bus_sys("turbine")
        assert gs.steady_state_frequency(sys, scenario_for(sys)) == pytest.approx(0.25)

    def test_inertia_free(self):
        import dataclasses
        sys = two_bus_sys("turbine")
        sc = scenario_for(sys)
        doubled = dataclasses.replace(
            sys, machine=dataclasses.replace(sys.machine, m=2 * sys.machine.m))
        assert gs.steady_state_frequency(sys, sc) == gs.steady_state_frequency(doubled, sc)


class TestNadir:
    def test_symmetric_parameters(self):
        sys = two_bus_sys("turbine")
        res = gs.nadir(sys, scenario_for(sys))
        assert res.method == "closed_form"
        assert res.value == pytest.approx(0.25 * (1 + np.exp(-np.pi / 2)), rel=1e-12)
        assert res.time == pytest.approx(np.pi / 2, rel=1e-12)

    def test_against_numeric_trace_maximum(self):
        # independent oracle: bounded Brent search on the closed-form trace
        g = make_grid([2, 2], [1, 1], [(0, 1, 1.0)], r_inv=[1, 1], tau=[1, 1])
        sys = gs.extract_representative(g, "turbine")
        sc = gs.StepScenario.single_bus(0, 2.0, sys.f)  # sum_u=2, sum_f=2
        res = gs.nadir(sys, sc)
        fn = closed_trace_fn(sys, sc)
        # bracket the global maximum on a dense grid, then refine locally
        ts = np.linspace(1e-9, 30.0, 30001)
        i = int(np.argmax(fn(ts)))
        opt = minimize_scalar(lambda t: -fn(t), bounds=(ts[i - 1], ts[i + 1]),
                              method="bounded", options={"xatol": 1e-12})
        assert res.value == pytest.approx(-opt.fun, rel=1e-9)
        assert res.time == pytest.approx(opt.x, abs=1e-6)
        assert res.value == pytest.approx(0.5395342382225, rel=1e-9)

    def test_monotone_decreasing_in_inertia(self):
        values = []
        for m in np.linspace(0.5, 10.0, 20):
            mach = gs.TurbineMachine(m=m, d=0.5, r_inv=3.0, tau=1.0)
            assert gs.damping_regime(mach).underdamped
            sys = gs.ProportionalSystem(machine=mach, f=np.ones(2),
                                        delta=np.zeros(2), delta_k_dc=np.zeros(2),
                                        m_mismatch=np.zeros(2))
            values.append(gs.nadir(sys, scenario_for(sys)).value)
        diffs = np.diff(values)
        assert np.all(diffs < 0)

    def test_never_below_steady_state(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            mach = gs.TurbineMachine(*np.exp(rng.uniform(np.log(0.3), np.log(3), 4)))
            if not gs.damping_regime(mach).underdamped:
                continue
            sys = gs.ProportionalSystem(machine=mach, f=np.ones(2),
                                        delta=np.zeros(2), delta_k_dc=np.zeros(2),
                                        m_mismatch=np.zeros(2))
            sc = scenario_for(sys, mag=-1.5)
            w_inf = abs(gs.steady_state_frequency(sys, sc))
            assert gs.nadir(sys, sc).value >= w_inf

    def test_swing_rejected(self):
        sys = two_bus_sys("swing")
        with pytest.raises(gs.MachineError, match="turbine"):
            gs.nadir(sys, scenario_for(sys))

    def test_overdamped_numeric_tag(self):
        g = make_grid([100, 100], [1, 1], [(0, 1, 1.0)], r_inv=[1, 1], tau=[1, 1])
        sys = gs.extract_representative(g, "turbine")
        res = gs.nadir(sys, scenario_for(sys), t_end=700.0, dt=1e-2)
        assert res.method == "numeric_trace"
        assert "no closed form" in res.note
        w_inf = abs(gs.steady_state_frequency(sys, scenario_for(sys)))
        assert res.value == pytest.approx(w_inf, rel=1e-3)


class TestRocof:
    def test_hand_value(self):
        g = make_grid([2, 4], [2, 4], [(0, 1, 1.0)], r_inv=[2, 4], tau=[1, 1])
        sys = gs.extract_representative(g, "turbine")
        sc = gs.StepScenario.single_bus(0, -3.0, sys.f)
        assert gs.rocof(sys, sc) == pytest.approx(0.5)

    def test_doubling_inertia_halves(self):
        import dataclasses
        sys = two_bus_sys("swing")
        sc = scenario_for(sys)
        doubled = dataclasses.replace(
            sys, machine=dataclasses.replace(sys.machine, m=2 * sys.machine.m))
        assert gs.rocof(doubled, sc) == pytest.approx(gs.rocof(sys, sc) / 2)

    def test_matches_oracle_initial_slope(self, twobus):
        for model in ("swing", "turbine"):
            sys = gs.extract_representative(twobus, model)
            sc = scenario_for(sys)
            full = gs.assemble_dynamics(twobus, model)
            slope = gs.initial_rocof(full, sc.u0, dt=1e-4)
            assert slope == pytest.approx(gs.rocof(sys, sc), rel=5e-3)

    def test_maximum_slope_is_at_zero(self):
        rng = np.random.default_rng(22)
        checked = 0
        while checked < 100:
            mach = gs.TurbineMachine(*np.exp(rng.uniform(np.log(0.3), np.log(3), 4)))
            if not gs.damping_regime(mach).underdamped:
                continue
            checked += 1
            sys = gs.ProportionalSystem(machine=mach, f=np.ones(3),
                                        delta=np.zeros(3), delta_k_dc=np.zeros(3),
                                        m_mismatch=np.zeros(3))
            sc = scenario_for(sys, mag=-2.0)
            tr = gs.system_frequency_trace(sys, sc, t_end=30.0, dt=1e-3)
            slopes = np.abs(np.diff(tr.values)) / tr.dt
            peak = gs.rocof(sys, sc)
            assert int(np.argmax(slopes)) == 0
            assert slopes.max() <= peak * (1 + 1e-3)


class TestOvershootCheck:
    def test_swing_never_overshoots(self):
        sys = two_bus_sys("swing")
        assert gs.swing_overshoot_check(sys, scenario_for(sys))

    def test_turbine_rejected(self):
        sys = two_bus_sys("turbine")
        with pytest.raises(gs.MachineError, match="swing"):
            gs.swing_overshoot_check(sys, scenario_for(sys))

    def test_trace_max_approaches_steady_state(self):
        sys = two_bus_sys("swing")
        sc = scenario_for(sys)
        mach = sys.machine
        t_end = 10.0 * mach.m / mach.d
        tr = gs.system_frequency_trace(sys, sc, t_end=t_end, dt=1e-3)
        w_inf = abs(gs.steady_state_frequency(sys, sc))
        assert abs(np.abs(tr.values).max() - w_inf) <= w_inf * np.exp(-10) * 1.01


def test_coi_matches_oracle_on_random_proportional_grids():
    rng = np.random.default_rng(23)
    for model in ("swing", "turbine"):
        g = random_prop_grid(rng, 6, model=model)
        sys, _ = pipeline(g, model)
        sc = gs.StepScenario.single_bus(2, -1.5, sys.f)
        full = gs.assemble_dynamics(g, model)
        tr = gs.integrate_step_response(full, sc.u0, dt=1e-3, t_end=30.0)
        emp = gs.empirical_metrics(tr, sys.f, full.m_vec)
        closed = gs.system_frequency_trace(sys, sc, t_end=30.0, dt=1e-3)
        w_inf = abs(gs.steady_state_frequency(sys, sc))
        assert np.abs(closed.values - emp.coi).max() < 1e-4 * w_inf
