"""Brute-force time-domain reference simulator.

Assembles the full linearized network dynamics from the raw per-bus
parameters (never the proportional fit, so the simulator remains valid for
non-proportional grids), integrates the step response with classical
fixed-step RK4, and measures every metric empirically from the trace:
center-of-inertia frequency, deviation trace, L2 synchronization cost,
Nadir, RoCoF and steady state. Every closed-form result in the package is
cross-checked against this module.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import Grid, GridError, build_laplacian


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class FullStateModel:
    """State matrices of the full network.

    State layout: per-bus angles, then frequencies, then (turbine model)
    turbine powers; dimension 2n or 3n. ``input_map`` sends the n-dimensional
    disturbance vector into the state derivative.
    """

    a: np.ndarray
    input_map: np.ndarray
    n: int
    model: str
    m_vec: np.ndarray

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def frequencies(self, states: np.ndarray) -> np.ndarray:
        return states[..., self.n:2 * self.n]


@dataclass(frozen=True)
class StateTrace:
    t: np.ndarray
    states: np.ndarray
    model: FullStateModel

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def w(self) -> np.ndarray:
        return self.model.frequencies(self.states)


@dataclass(frozen=True)
class EmpiricalMetrics:
    coi: np.ndarray
    wtilde: np.ndarray
    l2_cost: float
    l2_cost_tail_bound: float
    nadir: float
    nadir_time: float
    rocof: float
    steady_state: float
    settled: bool


def assemble_dynamics(grid: Grid, model: str) -> FullStateModel:
    """Build the state matrix from raw bus parameters and the Laplacian."""
    if model not in ("swing", "turbine"):
        raise OracleError(f"unknown model '{model}'")
    n = grid.n
    m_vec = grid.bus_array("m")
    d_vec = grid.bus_array("d")
    lap = build_laplacian(grid)
    m_inv = 1.0 / m_vec
    if model == "swing":
        a = np.zeros((2 * n, 2 * n))
        a[:n, n:2 * n] = np.eye(n)
        a[n:2 * n, :n] = -lap * m_inv[:, None]
        a[n:2 * n, n:2 * n] = -np.diag(d_vec * m_inv)
        b = np.zeros((2 * n, n))
    else:
        if not grid.has_turbine_fields():
            raise GridError("turbine model requires r_inv and tau on every bus")
        r_vec = grid.bus_array("r_inv")
        tau_vec = grid.bus_array("tau")
        a = np.zeros((3 * n, 3 * n))
        a[:n, n:2 * n] = np.eye(n)
        a[n:2 * n, :n] = -lap * m_inv[:, None]
        a[n:2 * n, n:2 * n] = -np.diag(d_vec * m_inv)
        a[n:2 * n, 2 * n:] = np.diag(m_inv)
        a[2 * n:, n:2 * n] = -np.diag(r_vec / tau_vec)
        a[2 * n:, 2 * n:] = -np.diag(1.0 / tau_vec)
        b = np.zeros((3 * n, n))
    b[n:2 * n, :] = np.diag(m_inv)
    return FullStateModel(a=a, input_map=b, n=n, model=model, m_vec=m_vec)


def slowest_decay_rate(model: FullStateModel) -> float:
    """Magnitude of the largest real part among the stable eigenvalues."""
    eig = np.linalg.eigvals(model.a)
    # drop the single marginal mode (uniform angle shift)
    stable = eig[np.abs(eig) > 1e-9 * max(np.abs(eig).max(), 1.0)]
    re = stable.real
    if re.size == 0 or re.max() >= 0:
        raise OracleError("assembled dynamics are not stable apart from the shift mode")
    return float(-re.max())


def min_time_constant(model: FullStateModel) -> float:
    eig = np.linalg.eigvals(model.a)
    return float(1.0 / np.abs(eig).max())


def integrate_step_response(model: FullStateModel, u0: np.ndarray,
                            dt: float = 1e-3, t_end: float = 60.0,
                            x0: np.ndarray | None = None) -> StateTrace:
    """Classical fixed-step RK4 from rest with constant input ``u0``.

    Warns when the step exceeds a tenth of the fastest time constant.
    ``x0`` overrides the zero initial state (used by the dissipation checks).
    """
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (model.n,):
        raise OracleError(f"disturbance shape {u0.shape} != ({model.n},)")
    if dt <= 0 or t_end <= 0:
        raise OracleError("dt and t_end must be positive")
    tc = min_time_constant(model)
    if dt > 0.1 * tc:
        warnings.warn(
            f"dt={dt:g} exceeds 0.1x min time constant ({tc:.3g} s); "
            "trace accuracy may suffer", RuntimeWarning, stacklevel=2)
    n_steps = int(round(t_end / dt))
    c = model.input_map @ u0
    if x0 is None:
        x0 = np.zeros(model.dim)
    states = _kernels.rk4_lti_trace(np.ascontiguousarray(model.a),
                                    np.asarray(x0, dtype=float).copy(), c, dt, n_steps)
    if not np.all(np.isfinite(states[-1])):
        raise OracleError("non-finite state encountered during integration")
    t = np.arange(n_steps + 1) * dt
    return StateTrace(t=t, states=states, model=model)


def empirical_metrics(trace: StateTrace, f: np.ndarray, m_vec: np.ndarray,
                      decay_rate: float | None = None) -> EmpiricalMetrics:
    """Metrics measured directly from a state trace.

    ``f`` fixes the deviation split (rating-weighted mean), ``m_vec`` the
    center-of-inertia weights; on proportional grids the two coincide. The
    L2 cost integrates the squared deviations by the trapezoid rule plus an
    exponential tail bound from ``decay_rate`` (the slowest stable mode).
    """
    w = trace.w
    m_vec = np.asarray(m_vec, dtype=float)
    coi = w @ m_vec / m_vec.sum()
    wtilde = w - coi[:, None]
    dt = trace.dt
    sq = np.einsum("ij,ij->i", wtilde, wtilde)
    l2_sq = float(np.trapezoid(sq, dx=dt))
    tail = 0.0
    if decay_rate is not None and decay_rate > 0:
        tail = float(sq[-1] / (2.0 * decay_rate))
    idx = int(np.argmax(np.abs(coi)))
    d_coi = np.diff(coi) / dt
    rocof_grid = float(np.abs(d_coi).max()) if d_coi.size else 0.0
    steady = float(coi[-1])
    tail_start = int(0.9 * coi.shape[0])
    band = float(np.ptp(coi[tail_start:]))
    settled = band <= 1e-6 * max(abs(steady), 1e-12)
    if not settled:
        warnings.warn(f"trace tail not settled (band {band:.3e}); "
                      "steady-state value unreliable", RuntimeWarning, stacklevel=2)
    return EmpiricalMetrics(
        coi=coi, wtilde=wtilde,
        l2_cost=float(np.sqrt(l2_sq + tail)),
        l2_cost_tail_bound=tail,
        nadir=float(np.abs(coi[idx])), nadir_time=float(trace.t[idx]),
        rocof=rocof_grid, steady_state=steady, settled=settled)


def initial_rocof(model: FullStateModel, u0: np.ndarray, dt: float = 1e-4) -> float:
    """Initial slope of the center-of-inertia frequency.

    One-sided difference at t=0 refined by a dt -> dt/4 Richardson step,
    since the maximum rate of change is attained as t -> 0+.
    """
    def forward_diff(h: float) -> float:
        tr = integrate_step_response(model, u0, dt=h, t_end=h)
        coi = tr.w @ model.m_vec / model.m_vec.sum()
        return (coi[1] - coi[0]) / h

    d1 = forward_diff(dt)
    d2 = forward_diff(dt / 4.0)
    return float(abs((4.0 * d2 - d1) / 3.0))
