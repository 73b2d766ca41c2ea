"""Inner products, cost matrices and synchronization costs.

The Sylvester/Kronecker solve is the reference route; every closed form is
checked against it over seeded random draws, and the cost quadratic form is
checked against trapezoid integration of the simulator traces.
"""

import numpy as np
import pytest

import gridsync as gs

from conftest import make_grid, pipeline, random_prop_grid

RNG_PARAMS = dict(lo=np.log(0.1), hi=np.log(10.0))
RNG_LAMS = dict(lo=np.log(0.01), hi=np.log(100.0))


def draw(rng, spec, size=None):
    return np.exp(rng.uniform(spec["lo"], spec["hi"], size))


def low_inertia_turbine_limit(d, r, t, lk, ll):
    """Independent small-inertia limit of the turbine cross inner product."""
    num = 2 * d * (d + r) + t * (2 * d + r) * (lk + ll) + 2 * lk * ll * t**2
    den = (2 * d * (d + r) ** 2 * (lk + ll) + d * t * (2 * d + r) * (lk + ll) ** 2
           + 2 * d * t * lk * ll * (2 * r + t * (lk + ll)))
    return num / den


class TestSylvesterRoute:
    def test_swing_equal_eigenvalues(self):
        got = gs.inner_product_sylvester(gs.SwingMachine(1, 1), 2.0, 2.0)
        assert got == pytest.approx(0.25, rel=1e-12)

    def test_swing_distinct_eigenvalues(self):
        got = gs.inner_product_sylvester(gs.SwingMachine(1, 1), 1.0, 3.0)
        assert got == pytest.approx(1.0 / 6.0, rel=1e-12)

    def test_turbine_equal_eigenvalues(self):
        got = gs.inner_product_sylvester(gs.TurbineMachine(1, 1, 1, 1), 2.0, 2.0)
        assert got == pytest.approx(1.0 / 6.0, rel=1e-12)

    def test_nonpositive_eigenvalue_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            gs.inner_product_sylvester(gs.SwingMachine(1, 1), 0.0, 1.0)

    def test_matches_quadrature(self):
        # second independent route: trapezoid quadrature of the two impulse
        # responses of the mode realizations
        machine = gs.TurbineMachine(1.2, 0.8, 1.1, 0.5)
        ss = gs.realize_state_space(machine)
        lk, ll = 0.7, 2.3
        dt, t_end = 1e-4, 120.0
        n = int(t_end / dt)
        from gridsync._kernels import rk4_lti_trace
        hk = rk4_lti_trace(ss.a_mode(lk), ss.b.copy(), np.zeros(3), dt, n) @ ss.c
        hl = rk4_lti_trace(ss.a_mode(ll), ss.b.copy(), np.zeros(3), dt, n) @ ss.c
        quad = np.trapezoid(hk * hl, dx=dt)
        assert gs.inner_product_sylvester(machine, lk, ll) == pytest.approx(quad, rel=1e-6)


class TestSwingClosedForm:
    def test_equal_eigenvalues_reduce(self):
        for lam, d in ((0.5, 0.7), (2.0, 1.0), (9.0, 3.0)):
            got = gs.inner_product_swing_closed(1.3, d, lam, lam)
            assert got == pytest.approx(1.0 / (2.0 * lam * d), rel=1e-14)

    def test_hand_value(self):
        assert gs.inner_product_swing_closed(1, 1, 1, 3) == pytest.approx(1 / 6)

    def test_matches_sylvester_on_random_draws(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            m, d = draw(rng, RNG_PARAMS, 2)
            lk, ll = draw(rng, RNG_LAMS, 2)
            ref = gs.inner_product_sylvester(gs.SwingMachine(m, d), lk, ll)
            got = gs.inner_product_swing_closed(m, d, lk, ll)
            assert got == pytest.approx(ref, rel=1e-10)


class TestTurbineNormClosedForm:
    def test_hand_value(self):
        assert gs.hnorm_turbine_closed(1, 1, 1, 1, 2.0) == pytest.approx(1 / 6)

    def test_high_inertia_limit(self):
        d, r, t, lam = 0.9, 1.3, 0.6, 2.0
        limit = (1.0 / (2 * lam * d)) * d / (r + d)
        got = gs.hnorm_turbine_closed(1e9, d, r, t, lam)
        assert got == pytest.approx(limit, rel=1e-7)

    def test_low_inertia_limit(self):
        d, r, t, lam = 0.9, 1.3, 0.6, 2.0
        limit = (1.0 / (2 * lam * d)) * (lam * t + d) / (r + lam * t + d)
        got = gs.hnorm_turbine_closed(1e-10, d, r, t, lam)
        assert got == pytest.approx(limit, rel=1e-7)

    def test_decreasing_in_inertia(self):
        vals = [gs.hnorm_turbine_closed(m, 1.0, 1.0, 0.5, 2.0)
                for m in np.linspace(0.01, 50, 40)]
        assert np.all(np.diff(vals) < 0)

    def test_matches_sylvester_on_random_draws(self):
        rng = np.random.default_rng(32)
        for _ in range(200):
            m, d, r, t = draw(rng, RNG_PARAMS, 4)
            lam = draw(rng, RNG_LAMS)
            ref = gs.inner_product_sylvester(gs.TurbineMachine(m, d, r, t), lam, lam)
            got = gs.hnorm_turbine_closed(m, d, r, t, lam)
            assert got == pytest.approx(ref, rel=1e-10)


class TestTurbineCrossClosedForm:
    def test_frozen_value(self):
        # numerator 92 by term-wise substitution; 92/664 confirmed against
        # the Sylvester route before freezing
        got = gs.inner_product_turbine_closed(1, 1, 1, 1, 1.0, 3.0)
        assert got == pytest.approx(92.0 / 664.0, rel=1e-12)
        ref = gs.inner_product_sylvester(gs.TurbineMachine(1, 1, 1, 1), 1.0, 3.0)
        assert got == pytest.approx(ref, rel=1e-10)

    def test_reduces_to_norm_at_equal_eigenvalues(self):
        rng = np.random.default_rng(33)
        for _ in range(100):
            m, d, r, t = draw(rng, RNG_PARAMS, 4)
            lam = draw(rng, RNG_LAMS)
            cross = gs.inner_product_turbine_closed(m, d, r, t, lam, lam)
            norm = gs.hnorm_turbine_closed(m, d, r, t, lam)
            assert cross == pytest.approx(norm, rel=1e-9)

    def test_matches_sylvester_on_random_draws(self):
        rng = np.random.default_rng(34)
        for _ in range(200):
            m, d, r, t = draw(rng, RNG_PARAMS, 4)
            lk, ll = draw(rng, RNG_LAMS, 2)
            ref = gs.inner_product_sylvester(gs.TurbineMachine(m, d, r, t), lk, ll)
            got = gs.inner_product_turbine_closed(m, d, r, t, lk, ll)
            assert got == pytest.approx(ref, rel=1e-10)

    def test_low_inertia_limit(self):
        rng = np.random.default_rng(35)
        for _ in range(25):
            d, r, t = draw(rng, RNG_PARAMS, 3)
            lk, ll = draw(rng, RNG_LAMS, 2)
            limit = low_inertia_turbine_limit(d, r, t, lk, ll)
            got = gs.inner_product_turbine_closed(1e-8, d, r, t, lk, ll)
            assert got == pytest.approx(limit, rel=1e-4)

    def test_symmetry(self):
        got_kl = gs.inner_product_turbine_closed(1.5, 0.8, 1.2, 0.4, 0.9, 7.0)
        got_lk = gs.inner_product_turbine_closed(1.5, 0.8, 1.2, 0.4, 7.0, 0.9)
        assert got_kl == pytest.approx(got_lk, rel=1e-14)


class TestCostMatrix:
    def test_homogeneous_is_diagonal(self, threebus_path):
        sys, basis = pipeline(threebus_path, "swing")
        y = gs.build_cost_matrix(basis, sys.machine).y
        assert np.allclose(y, np.diag([0.5, 1.0 / 6.0]), atol=1e-14)

    def test_two_bus_rated(self):
        lf = gs.scaled_laplacian(np.array([[1.0, -1.0], [-1.0, 1.0]]),
                                 np.array([1.0, 3.0]))
        basis = gs.modal_decompose(lf, np.array([1.0, 3.0]))
        y = gs.build_cost_matrix(basis, gs.SwingMachine(1, 1)).y
        assert y[0, 0] == pytest.approx(5.0 / 16.0, rel=1e-12)

    def test_methods_agree(self, ring35):
        for model in ("swing", "turbine"):
            sys, basis = pipeline(ring35, model)
            closed = gs.build_cost_matrix(basis, sys.machine, "closed_form").y
            sylv = gs.build_cost_matrix(basis, sys.machine, "sylvester").y
            assert np.allclose(closed, sylv, rtol=1e-9, atol=1e-14)

    def test_psd(self, ring35):
        for model in ("swing", "turbine"):
            sys, basis = pipeline(ring35, model)
            y = gs.build_cost_matrix(basis, sys.machine).y
            lam = np.linalg.eigvalsh(y)
            assert lam.min() >= -1e-10 * lam.max()

    def test_unknown_method(self, twobus):
        sys, basis = pipeline(twobus, "swing")
        with pytest.raises(ValueError, match="method"):
            gs.build_cost_matrix(basis, sys.machine, "magic")


class TestSyncCost:
    def test_two_bus_homogeneous(self, twobus):
        sys, basis = pipeline(twobus, "swing")
        got = gs.sync_cost(basis, sys.machine, np.array([1.0, 0.0]))
        assert got == pytest.approx(1.0 / (2.0 * np.sqrt(2.0)), rel=1e-12)

    def test_two_bus_rated(self):
        f = np.array([1.0, 3.0])
        lf = gs.scaled_laplacian(np.array([[1.0, -1.0], [-1.0, 1.0]]), f)
        basis = gs.modal_decompose(lf, f)
        got = gs.sync_cost(basis, gs.SwingMachine(1, 1), np.array([1.0, 0.0]))
        assert got == pytest.approx(np.sqrt(15.0) / 8.0, rel=1e-12)

    def test_aggregate_direction_is_free(self, ring35):
        sys, basis = pipeline(ring35, "swing")
        assert gs.sync_cost(basis, sys.machine, sys.f.copy()) < 1e-10

    def test_sign_and_scale(self, ring35):
        sys, basis = pipeline(ring35, "turbine")
        u0 = np.zeros(ring35.n)
        u0[4] = -2.0
        c = gs.sync_cost(basis, sys.machine, u0)
        assert gs.sync_cost(basis, sys.machine, -u0) == pytest.approx(c, rel=1e-14)
        assert gs.sync_cost(basis, sys.machine, 3 * u0) == pytest.approx(3 * c, rel=1e-12)

    def test_matches_trace_quadrature(self, twobus):
        sys, basis = pipeline(twobus, "swing")
        u0 = np.array([1.0, 0.0])
        full = gs.assemble_dynamics(twobus, "swing")
        tr = gs.integrate_step_response(full, u0, dt=1e-3, t_end=60.0)
        emp = gs.empirical_metrics(tr, sys.f, full.m_vec,
                                   decay_rate=gs.slowest_decay_rate(full))
        assert gs.sync_cost(basis, sys.machine, u0) == pytest.approx(emp.l2_cost, rel=1e-2)

    def test_homogeneous_swing_cost_ignores_inertia(self, ring35):
        # uniform ratings: inertia cancels out of the quadratic form
        n = ring35.n
        uni = gs.validate_grid("uniform", [gs.Bus(id=i, m=1.0, d=1.0) for i in range(n)],
                               list(ring35.lines))
        sys, basis = pipeline(uni, "swing")
        u0 = np.zeros(n)
        u0[3] = 1.0
        ref = gs.sync_cost(basis, gs.SwingMachine(1.0, 1.0), u0)
        for m in (0.1, 0.7, 3.3, 10.0):
            got = gs.sync_cost(basis, gs.SwingMachine(m, 1.0), u0)
            assert abs(got - ref) <= 1e-12 * ref

    def test_worst_unit_disturbance_is_fiedler_direction(self, ring35):
        n = ring35.n
        uni = gs.validate_grid("uniform", [gs.Bus(id=i, m=1.0, d=1.0) for i in range(n)],
                               list(ring35.lines))
        sys, basis = pipeline(uni, "swing")
        costs = [gs.sync_cost(basis, sys.machine, basis.vectors[:, k].copy())
                 for k in range(1, n)]
        assert int(np.argmax(costs)) == 0


class TestInertiaLimits:
    def test_swing_high_inertia_nearly_diagonal(self):
        # heterogeneous ratings with well-separated eigenvalues
        g = make_grid([1, 2, 3, 4], [1, 2, 3, 4],
                      [(0, 1, 1.0), (1, 2, 2.5), (2, 3, 4.0), (0, 3, 1.5)])
        sys, basis = pipeline(g, "swing")
        lams = basis.lambdas[1:]
        assert np.abs(np.diff(lams)).min() > 0.4  # distinct eigenvalues
        y = gs.build_cost_matrix(basis, gs.SwingMachine(1e4, sys.machine.d)).y
        diag_scale = np.abs(np.diag(y)).min()
        off = y - np.diag(np.diag(y))
        assert np.abs(off).max() < 1e-2 * diag_scale

    def test_swing_low_inertia_limit_matrix(self, ring35):
        sys, basis = pipeline(ring35, "swing")
        d = sys.machine.d
        u0 = np.zeros(ring35.n)
        u0[7] = 1.0
        z0 = gs.project_disturbance(basis, u0)
        lams = basis.lambdas[1:]
        lk, ll = lams[:, None], lams[None, :]
        limit_y = basis.gamma / (d * (lk + ll))
        limit_cost_sq = float(z0 @ limit_y @ z0)
        got = gs.sync_cost(basis, gs.SwingMachine(1e-6, d), u0)
        assert got**2 == pytest.approx(limit_cost_sq, rel=1e-4)


class TestMeanSyncCost:
    def test_two_bus_uniform(self, twobus):
        sys, basis = pipeline(twobus, "swing")
        assert gs.mean_sync_cost(basis, sys.machine, "I") == pytest.approx(0.5, rel=1e-12)

    def test_homogeneous_uniform_matches_pinv_trace(self, ring35):
        n = ring35.n
        d_rep = 1.7
        uni = gs.validate_grid("uniform", [gs.Bus(id=i, m=1.0, d=d_rep) for i in range(n)],
                               list(ring35.lines))
        sys, basis = pipeline(uni, "swing")
        lap = gs.build_laplacian(uni)
        expected = np.sqrt(np.trace(np.linalg.pinv(lap)) / (2.0 * d_rep))
        got = gs.mean_sync_cost(basis, sys.machine, "I")
        assert got == pytest.approx(expected, rel=1e-10)

    def test_rating_preset_is_trace_of_y(self, ring35):
        sys, basis = pipeline(ring35, "turbine")
        y = gs.build_cost_matrix(basis, sys.machine).y
        assert gs.mean_sync_cost(basis, sys.machine, "F") == pytest.approx(
            np.sqrt(np.trace(y)), rel=1e-12)

    def test_monte_carlo_squared_rating(self, ring35):
        sys, basis = pipeline(ring35, "swing")
        y = gs.build_cost_matrix(basis, sys.machine).y
        rng = np.random.default_rng(36)
        n_samples = 100_000
        u = rng.standard_normal((n_samples, ring35.n)) * sys.f
        z = (u / np.sqrt(sys.f)) @ basis.v_perp
        costs_sq = np.einsum("ij,jk,ik->i", z, y, z)
        mc = costs_sq.mean()
        se = costs_sq.std(ddof=1) / np.sqrt(n_samples)
        expected = gs.mean_sync_cost(basis, sys.machine, "F2") ** 2
        assert abs(mc - expected) < 3 * se


def test_prop2_quadratic_form_vs_oracle_on_random_grids():
    rng = np.random.default_rng(37)
    for model in ("swing", "turbine"):
        for trial in range(3):
            n = int(rng.integers(3, 9))
            g = random_prop_grid(rng, n, model=model, name=f"{model}{trial}")
            sys, basis = pipeline(g, model)
            u0 = rng.normal(size=n)
            full = gs.assemble_dynamics(g, model)
            decay = gs.slowest_decay_rate(full)
            t_end = min(300.0, max(40.0, 16.2 / decay))
            tr = gs.integrate_step_response(full, u0, dt=1e-3, t_end=t_end)
            emp = gs.empirical_metrics(tr, sys.f, full.m_vec, decay_rate=decay)
            closed = gs.sync_cost(basis, sys.machine, u0)
            assert closed == pytest.approx(emp.l2_cost, rel=1e-2)
