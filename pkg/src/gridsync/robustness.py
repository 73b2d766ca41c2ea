"""Deviations from proportionality, and their decay with connectivity.

When bus parameters are not exactly proportional to the ratings, the clean
split into system frequency and residual breaks. The mismatch acts as a
diagonal feedback perturbation around the proportional system; its
rating-weighted sum vanishes by construction of the fit, which pins the DC
behavior: all buses still converge to the common steady state of the
proportional model. Away from DC the perturbed response converges to the
representative-machine reduced-order model as the network connectivity
(the smallest nonzero eigenvalue of the scaled Laplacian) grows; the
``connectivity_gap`` experiment measures that trend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, add_random_lines, build_laplacian, scaled_laplacian
from .machine import (ProportionalSystem, RepresentativeMachine,
                      TurbineMachine, eval_transfer, extract_representative)
from .oracle import (assemble_dynamics, empirical_metrics,
                     integrate_step_response, slowest_decay_rate)
from .spectral import ModalBasis, modal_decompose
from .synccost import sync_cost


class RobustnessError(RuntimeError):
    pass


@dataclass(frozen=True)
class PerturbationModel:
    """Per-bus mismatch against the proportional fit.

    ``delta`` is the static damping mismatch, ``delta_k_dc`` the DC
    controller mismatch (turbine only), ``delta_tilde`` the static mismatch
    conjugated into the modal basis. ``m_mismatch``, ``r_inv_over_f`` and
    ``tau_vec`` carry what is needed to evaluate the full dynamic mismatch
    at any frequency.
    """

    delta: np.ndarray
    delta_tilde: np.ndarray
    delta_k_dc: np.ndarray | None
    m_mismatch: np.ndarray
    r_inv_over_f: np.ndarray | None
    tau_vec: np.ndarray | None


def perturbation_deltas(grid: Grid, sys: ProportionalSystem,
                        basis: ModalBasis) -> PerturbationModel:
    """Collect the mismatch vectors and their modal conjugation."""
    f = sys.f
    scale = float(f.sum()) * max(abs(sys.machine.d), 1.0)
    if abs(float(np.dot(f, sys.delta))) > 1e-10 * scale:
        raise RobustnessError("rating-weighted damping mismatch does not sum to zero")
    if sys.delta_k_dc is not None:
        r_scale = float(f.sum()) * max(abs(sys.machine.r_inv), 1.0)
        if abs(float(np.dot(f, sys.delta_k_dc))) > 1e-10 * r_scale:
            raise RobustnessError("rating-weighted droop mismatch does not sum to zero")
    v = basis.vectors
    delta_tilde = v.T @ (v * sys.delta[:, None])
    if isinstance(sys.machine, TurbineMachine):
        r_over_f = grid.bus_array("r_inv") / f
        tau_vec = grid.bus_array("tau")
    else:
        r_over_f = None
        tau_vec = None
    return PerturbationModel(delta=sys.delta, delta_tilde=delta_tilde,
                             delta_k_dc=sys.delta_k_dc,
                             m_mismatch=sys.m_mismatch,
                             r_inv_over_f=r_over_f, tau_vec=tau_vec)


def _mismatch_at(machine: RepresentativeMachine, pert: PerturbationModel,
                 s: complex) -> np.ndarray:
    """Per-bus dynamic mismatch delta_i(s); exact for both machine families."""
    total = pert.delta.astype(complex) + s * pert.m_mismatch
    if isinstance(machine, TurbineMachine):
        k0 = machine.r_inv / (machine.tau * s + 1.0)
        ki = pert.r_inv_over_f / (pert.tau_vec * s + 1.0)
        total = total + (k0 - ki)
    return total


def _diag_closed_loop(machine: RepresentativeMachine, lambdas: np.ndarray,
                      s: complex) -> np.ndarray:
    """Diagonal closed-loop responses s g0 / (s + lambda_k g0)."""
    g0 = eval_transfer(machine, s)
    return s * g0 / (s + lambdas * g0)


def perturbed_transfer_eval(basis: ModalBasis, machine: RepresentativeMachine,
                            pert: PerturbationModel, s: complex) -> np.ndarray:
    """Disturbance-to-frequency transfer matrix of the perturbed network.

    Evaluates F^{-1/2} V (I - H ~D)^{-1} H V^T F^{-1/2} at the complex point
    ``s`` (nonzero; DC is served by :func:`perturbed_steady_state`), where H
    is the diagonalized proportional closed loop and ~D the modal conjugation
    of the dynamic mismatch.
    """
    s = complex(s)
    if s == 0:
        raise RobustnessError("use perturbed_steady_state for the DC value")
    n = basis.n
    h = _diag_closed_loop(machine, basis.lambdas, s)
    v = basis.vectors
    dmis = _mismatch_at(machine, pert, s)
    d_tilde = v.T @ (v * dmis[:, None])
    lhs = np.eye(n, dtype=complex) - h[:, None] * d_tilde
    try:
        x = np.linalg.solve(lhs, np.diag(h).astype(complex))
    except np.linalg.LinAlgError:
        raise RobustnessError(f"perturbed loop singular at s={s}") from None
    s_f = 1.0 / np.sqrt(basis.f)
    return (v * s_f[:, None]) @ x @ (v * s_f[:, None]).T


@dataclass(frozen=True)
class SteadyStateResult:
    value: float
    max_bus_deviation: float
    dc_identity_residual: float


def perturbed_steady_state(grid: Grid, model: str, u0: np.ndarray) -> SteadyStateResult:
    """Common terminal frequency of all buses after a step, with DC checks.

    The value is total disturbance over total effective damping, identical to
    the proportional system's steady state. The DC structure is verified
    numerically: the perturbation is invisible at s=0 because its
    rating-weighted sum vanishes, so the perturbed and nominal transfer
    matrices coincide there.
    """
    u0 = np.asarray(u0, dtype=float)
    sys = extract_representative(grid, model)
    d_vec = grid.bus_array("d")
    if model == "turbine":
        total_damping = float((d_vec + grid.bus_array("r_inv")).sum())
    else:
        total_damping = float(d_vec.sum())
    value = float(u0.sum()) / total_damping

    basis = modal_decompose(scaled_laplacian(build_laplacian(grid), sys.f), sys.f)
    pert = perturbation_deltas(grid, sys, basis)
    n = basis.n
    h0 = np.zeros((n, n))
    h0[0, 0] = eval_transfer(sys.machine, 0.0).real
    dc_mismatch = pert.delta.copy()
    if pert.delta_k_dc is not None:
        dc_mismatch = dc_mismatch + pert.delta_k_dc
    v = basis.vectors
    d_tilde0 = v.T @ (v * dc_mismatch[:, None])
    # the double product through the kernel direction must vanish
    residual = float(np.abs(h0 @ d_tilde0 @ h0).max())
    inv = np.linalg.solve(np.eye(n) - h0 @ d_tilde0, h0)
    residual = max(residual, float(np.abs(inv - h0).max()))
    s_f = 1.0 / np.sqrt(basis.f)
    t0 = (v * s_f[:, None]) @ h0 @ (v * s_f[:, None]).T
    bus_values = t0 @ u0
    max_dev = float(np.abs(bus_values - value).max())
    return SteadyStateResult(value=value, max_bus_deviation=max_dev,
                             dc_identity_residual=residual)


@dataclass(frozen=True)
class ConnectivityRow:
    k: int
    seed: int
    lambda1: float
    freq_gap: float
    cost_true: float
    cost_prop: float
    rel_err: float


def frequency_gap(basis: ModalBasis, machine: RepresentativeMachine,
                  pert: PerturbationModel, u0: np.ndarray,
                  omega_max: float = 10.0, n_omega: int = 400) -> float:
    """Sup over a bounded frequency grid of the reduced-order model error.

    Measures how far the perturbed response to ``u0`` is from every bus
    following the representative machine driven by the aggregate disturbance.
    The grid is log-spaced in [1e-3, omega_max]; the comparison is only
    meaningful on bounded bands, resonances preclude a uniform statement.
    """
    omegas = np.logspace(-3, np.log10(omega_max), n_omega)
    scale = float(u0.sum()) / float(basis.f.sum())
    ones = np.ones(basis.n)
    worst = 0.0
    for w in omegas:
        s = 1j * w
        resp = perturbed_transfer_eval(basis, machine, pert, s) @ u0
        ideal = eval_transfer(machine, s) * scale * ones
        worst = max(worst, float(np.linalg.norm(resp - ideal)))
    return worst


def connectivity_gap(grid: Grid, model: str, u0: np.ndarray,
                     omega_max: float = 10.0,
                     k_schedule=(0, 25, 50, 200, 500),
                     seeds=(0,), dt: float = 1e-3,
                     t_end: float = 60.0) -> list[ConnectivityRow]:
    """Line-addition experiment: reduced-model gap and cost versus density.

    For each line count ``k`` and seed, augments the grid with random lines,
    then reports the smallest nonzero eigenvalue of the scaled Laplacian, the
    bounded-band frequency gap, the simulated synchronization cost under the
    true parameters and the proportional-fit prediction, and their relative
    error.
    """
    ks = list(k_schedule)
    if any(b < a for a, b in zip(ks, ks[1:])):
        raise RobustnessError("k_schedule must be ascending")
    u0 = np.asarray(u0, dtype=float)
    sys = extract_representative(grid, model)
    rows: list[ConnectivityRow] = []
    for k in ks:
        for seed in seeds:
            g_k = add_random_lines(grid, k, seed)
            basis = modal_decompose(
                scaled_laplacian(build_laplacian(g_k), sys.f), sys.f)
            pert = perturbation_deltas(g_k, sys, basis)
            gap = frequency_gap(basis, sys.machine, pert, u0, omega_max)
            full = assemble_dynamics(g_k, model)
            trace = integrate_step_response(full, u0, dt=dt, t_end=t_end)
            met = empirical_metrics(trace, sys.f, full.m_vec,
                                    decay_rate=slowest_decay_rate(full))
            cost_prop = sync_cost(basis, sys.machine, u0, method="closed_form")
            rel = abs(met.l2_cost - cost_prop) / met.l2_cost if met.l2_cost else 0.0
            rows.append(ConnectivityRow(
                k=k, seed=int(seed), lambda1=float(basis.lambdas[1]),
                freq_gap=gap, cost_true=met.l2_cost, cost_prop=cost_prop,
                rel_err=rel))
    return rows
