"""Shared fixtures: hand-checkable grids and seeded random grid factories."""

from __future__ import annotations

import numpy as np
import pytest

import gridsync as gs


def make_grid(m, d, lines, r_inv=None, tau=None, f=None, name="test"):
    """Grid from parameter vectors and (i, j, weight) line triples."""
    n = len(m)
    r_inv = r_inv if r_inv is not None else [None] * n
    tau = tau if tau is not None else [None] * n
    f = f if f is not None else [None] * n
    buses = [gs.Bus(id=i, m=float(m[i]), d=float(d[i]),
                    r_inv=None if r_inv[i] is None else float(r_inv[i]),
                    tau=None if tau[i] is None else float(tau[i]),
                    f=None if f[i] is None else float(f[i]))
             for i in range(n)]
    line_objs = [gs.Line(int(i), int(j), float(w)) for i, j, w in lines]
    return gs.validate_grid(name, buses, line_objs)


@pytest.fixture
def twobus():
    return make_grid([1, 1], [1, 1], [(0, 1, 1.0)],
                     r_inv=[1, 1], tau=[1, 1], name="twobus")


@pytest.fixture
def threebus_path():
    return make_grid([1, 1, 1], [1, 1, 1], [(0, 1, 1.0), (1, 2, 1.0)],
                     r_inv=[1, 1, 1], tau=[1, 1, 1], name="threebus_path")


@pytest.fixture(scope="session")
def ring35():
    return gs.load_grid(gs.bundled_grid_path("ring35"))


def random_lines(rng, n, min_lambda1=0.5):
    """Random connected line set whose scaled-unit Laplacian gap is not tiny."""
    pairs = set()
    lines = []
    for i in range(1, n):
        j = int(rng.integers(0, i))
        pairs.add(frozenset((j, i)))
        lines.append((j, i, float(rng.uniform(1.0, 3.0))))

    def lambda1():
        g = make_grid(np.ones(n), np.ones(n), lines)
        lam = np.linalg.eigvalsh(gs.build_laplacian(g))
        return lam[1]

    tries = 0
    while lambda1() < min_lambda1 and tries < 10 * n:
        i, j = sorted(rng.choice(n, size=2, replace=False))
        if frozenset((i, j)) not in pairs:
            pairs.add(frozenset((i, j)))
            lines.append((int(i), int(j), float(rng.uniform(1.0, 3.0))))
        tries += 1
    return lines


def random_prop_grid(rng, n, model="turbine", name="prop"):
    """Exactly proportional grid with canonical rating normalization."""
    f = rng.uniform(0.5, 2.0, n)
    f /= f.mean()
    m_rep = float(rng.uniform(0.8, 2.5))
    d_rep = float(rng.uniform(0.5, 1.2)) * m_rep
    lines = random_lines(rng, n)
    if model == "turbine":
        r_rep = float(rng.uniform(0.5, 1.5)) * m_rep
        tau_rep = float(rng.uniform(0.3, 0.7))
        return make_grid(f * m_rep, f * d_rep, lines,
                         r_inv=f * r_rep, tau=np.full(n, tau_rep), name=name)
    return make_grid(f * m_rep, f * d_rep, lines, name=name)


def random_nonprop_grid(rng, n, model="turbine", spread=0.3, name="nonprop"):
    """Heterogeneous grid whose damping/droop/time constants break proportionality."""
    g = random_prop_grid(rng, n, model=model, name=name)
    buses = []
    for b in g.buses:
        wob = float(np.exp(rng.uniform(-spread, spread)))
        if model == "turbine":
            buses.append(gs.Bus(id=b.id, m=b.m, d=b.d * wob,
                                r_inv=b.r_inv * float(np.exp(rng.uniform(-spread, spread))),
                                tau=float(rng.uniform(0.3, 0.7))))
        else:
            buses.append(gs.Bus(id=b.id, m=b.m, d=b.d * wob))
    return gs.validate_grid(name, buses, list(g.lines))


def pipeline(grid, model):
    """Fit, scaled Laplacian and modal basis in one call."""
    sys = gs.extract_representative(grid, model)
    basis = gs.modal_decompose(
        gs.scaled_laplacian(gs.build_laplacian(grid), sys.f), sys.f)
    return sys, basis


def settle_t_end(full_model, accuracy=1e-7, lo=40.0, hi=400.0):
    """Integration horizon long enough for the trace tail to decay away."""
    decay = gs.slowest_decay_rate(full_model)
    return float(min(hi, max(lo, np.log(1.0 / accuracy) / decay)))
