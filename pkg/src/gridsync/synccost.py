"""Synchronization cost of the oscillatory residual after a step.

The residual of the bus frequencies around the system frequency has squared
L2 norm ``z0^T Y z0`` where ``z0`` is the modal projection of the disturbance
and ``Y`` pairs the projected inverse ratings with the Gram matrix of modal
step-kernel inner products. Two interchangeable evaluation routes exist for
the inner products:

* ``sylvester`` - solve the 2x2/3x3 Sylvester equation for each eigenvalue
  pair by Kronecker vectorization (a dense linear solve of size at most 9)
  and read off the output quadratic form. No closed forms involved; this is
  the reference route.
* ``closed_form`` - rational functions of the machine parameters and the
  eigenvalue pair, cheap enough for large sweeps.

The two routes are cross-checked against each other in the test suite and by
the CLI self-test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .machine import RepresentativeMachine, SwingMachine, realize_state_space
from .spectral import ModalBasis, project_disturbance, sigma_z

METHODS = ("closed_form", "sylvester")


@dataclass(frozen=True)
class CostMatrix:
    """Symmetric PSD matrix of weighted modal inner products."""

    y: np.ndarray
    method: str


def _require_positive(lam: float, name: str) -> None:
    if not lam > 0:
        raise ValueError(f"{name} must be positive (stable closed-loop mode), got {lam}")


def solve_output_gram(a_k: np.ndarray, a_l: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unique solution Q of a_k Q + Q a_l^T + b b^T = 0 via vectorization."""
    ns = a_k.shape[0]
    eye = np.eye(ns)
    coeff = np.kron(eye, a_k) + np.kron(a_l, eye)
    rhs = -np.outer(b, b).flatten(order="F")
    q = np.linalg.solve(coeff, rhs)
    return q.reshape((ns, ns), order="F")


def inner_product_sylvester(machine: RepresentativeMachine,
                            lam_k: float, lam_l: float) -> float:
    """Modal step-kernel inner product from the Sylvester-equation route."""
    _require_positive(lam_k, "lam_k")
    _require_positive(lam_l, "lam_l")
    ss = realize_state_space(machine)
    q = solve_output_gram(ss.a_mode(lam_k), ss.a_mode(lam_l), ss.b)
    return float(ss.c @ q @ ss.c)


def inner_product_swing_closed(m: float, d: float,
                               lam_k: float, lam_l: float) -> float:
    """Closed-form inner product for the second-order (swing) kernel."""
    _require_positive(lam_k, "lam_k")
    _require_positive(lam_l, "lam_l")
    return _kernels.swing_inner(m, d, lam_k, lam_l)


def hnorm_turbine_closed(m: float, d: float, r_inv: float, tau: float,
                         lam: float) -> float:
    """Closed-form squared norm of the third-order (turbine) kernel."""
    _require_positive(lam, "lam")
    return _kernels.turbine_norm(m, d, r_inv, tau, lam)


def inner_product_turbine_closed(m: float, d: float, r_inv: float, tau: float,
                                 lam_k: float, lam_l: float) -> float:
    """Closed-form cross inner product for the third-order (turbine) kernel.

    Evaluates the explicit numerator/denominator polynomial pair term by
    term; reduces to :func:`hnorm_turbine_closed` at equal eigenvalues.
    """
    _require_positive(lam_k, "lam_k")
    _require_positive(lam_l, "lam_l")
    return _kernels.turbine_inner(m, d, r_inv, tau, lam_k, lam_l)


def _gram_closed(machine: RepresentativeMachine, lams: np.ndarray) -> np.ndarray:
    if isinstance(machine, SwingMachine):
        return _kernels.swing_gram(machine.m, machine.d, lams)
    return _kernels.turbine_gram(machine.m, machine.d, machine.r_inv,
                                 machine.tau, lams)


def _gram_sylvester(machine: RepresentativeMachine, lams: np.ndarray) -> np.ndarray:
    n = lams.shape[0]
    ss = realize_state_space(machine)
    modes = [ss.a_mode(lam) for lam in lams]
    g = np.empty((n, n))
    for k in range(n):
        for l in range(k, n):
            q = solve_output_gram(modes[k], modes[l], ss.b)
            v = float(ss.c @ q @ ss.c)
            g[k, l] = v
            g[l, k] = v
    return g


def build_cost_matrix(basis: ModalBasis, machine: RepresentativeMachine,
                      method: str = "closed_form") -> CostMatrix:
    """Weighted Gram matrix y_kl = gamma_kl <kernel_k, kernel_l>."""
    if method not in METHODS:
        raise ValueError(f"unknown method '{method}', expected one of {METHODS}")
    lams = np.ascontiguousarray(basis.lambdas[1:])
    gram = _gram_closed(machine, lams) if method == "closed_form" \
        else _gram_sylvester(machine, lams)
    y = basis.gamma * gram
    y = 0.5 * (y + y.T)
    return CostMatrix(y=y, method=method)


def sync_cost(basis: ModalBasis, machine: RepresentativeMachine,
              u0: np.ndarray, method: str = "closed_form") -> float:
    """L2 norm of the frequency deviations from the system frequency."""
    z0 = project_disturbance(basis, u0)
    y = build_cost_matrix(basis, machine, method).y
    val = float(z0 @ y @ z0)
    return float(np.sqrt(max(val, 0.0)))


def mean_sync_cost(basis: ModalBasis, machine: RepresentativeMachine,
                   sigma_u, method: str = "closed_form") -> float:
    """Root mean squared synchronization cost over random step directions.

    ``sigma_u`` follows :func:`gridsync.spectral.sigma_z`: a preset name
    ("I", "F", "F2") or an explicit diagonal disturbance covariance.
    """
    sz = sigma_z(basis, sigma_u)
    y = build_cost_matrix(basis, machine, method).y
    val = float(np.trace(y @ sz))
    return float(np.sqrt(max(val, 0.0)))
