"""Representative-machine models and the proportional parameter fit.

A grid is *proportional* when every bus transfer function is a common
representative machine divided by the bus rating. For real data that never
holds exactly; ``extract_representative`` fits the representative parameters
(inertia-weighted damping and droop, arithmetic-mean inertia and turbine time
constant) and records the per-bus residuals. The fit is constructed so that
the rating-weighted residual sum vanishes identically, which is what makes
the steady-state analysis of the perturbed system exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Bus, Grid, GridError


class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class SwingMachine:
    """First-order machine 1/(m s + d)."""

    m: float
    d: float


@dataclass(frozen=True)
class TurbineMachine:
    """Swing machine with first-order turbine control.

    Transfer function (tau s + 1) / (m tau s^2 + (m + d tau) s + d + r_inv).
    """

    m: float
    d: float
    r_inv: float
    tau: float


RepresentativeMachine = SwingMachine | TurbineMachine


@dataclass(frozen=True)
class ProportionalSystem:
    """Representative machine plus ratings and fit residuals.

    ``delta`` is the per-bus damping mismatch d - d_i/f_i; ``delta_k_dc`` the
    DC controller mismatch for the turbine model (None for swing).
    ``m_mismatch`` is m - m_i/f_i, identically zero when ratings derive from
    inertia and only nonzero under an explicit per-bus rating override.
    """

    machine: RepresentativeMachine
    f: np.ndarray
    delta: np.ndarray
    delta_k_dc: np.ndarray | None
    m_mismatch: np.ndarray

    @property
    def sum_f(self) -> float:
        return float(self.f.sum())


@dataclass(frozen=True)
class StateSpace:
    """Minimal realization of the representative step-response kernel g0(s)/s.

    Closed-loop mode k substitutes ``a_mode(lambda_k) = a - lambda_k b c``.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def order(self) -> int:
        return self.a.shape[0]

    def a_mode(self, lam: float) -> np.ndarray:
        return self.a - lam * np.outer(self.b, self.c)

    def transfer(self, lam: float, s: complex) -> complex:
        """Evaluate the mode-lam transfer function at the complex point s."""
        n = self.order
        sol = np.linalg.solve(s * np.eye(n) - self.a_mode(lam), self.b.astype(complex))
        return complex(self.c @ sol)


def _f_override(grid: Grid) -> np.ndarray | None:
    given = [b.f is not None for b in grid.buses]
    if all(given):
        return grid.bus_array("f")
    if any(given):
        raise MachineError("per-bus rating override 'f' must be set on all buses or none")
    return None


def extract_representative(grid: Grid, model: str) -> ProportionalSystem:
    """Fit the representative machine and per-bus ratings to a grid.

    Ratings default to inertia shares f_i = m_i / mean(m); an explicit per-bus
    "f" field overrides them, in which case the representative inertia is the
    rating-weighted mean so the inertia residuals also sum to zero.
    """
    if model not in ("swing", "turbine"):
        raise MachineError(f"unknown machine model '{model}'")
    m_vec = grid.bus_array("m")
    d_vec = grid.bus_array("d")
    n = grid.n
    f = _f_override(grid)
    if f is None:
        m = float(m_vec.mean())
        f = m_vec / m
    else:
        m = float(m_vec.sum() / f.sum())
    sum_f = float(f.sum())
    d = float(d_vec.sum() / sum_f)
    delta = d - d_vec / f
    m_mismatch = m - m_vec / f

    if model == "turbine":
        if not grid.has_turbine_fields():
            raise MachineError("turbine model requires r_inv and tau on every bus")
        r_vec = grid.bus_array("r_inv")
        tau_vec = grid.bus_array("tau")
        r_inv = float(r_vec.sum() / sum_f)
        tau = float(tau_vec.mean())
        machine: RepresentativeMachine = TurbineMachine(m=m, d=d, r_inv=r_inv, tau=tau)
        delta_k_dc = r_inv - r_vec / f
    else:
        machine = SwingMachine(m=m, d=d)
        delta_k_dc = None

    balance = float(np.dot(f, delta))
    if abs(balance) > 1e-10 * sum_f * max(abs(d), 1.0):
        raise MachineError(f"rating-weighted damping residuals do not balance: {balance:.3e}")
    return ProportionalSystem(machine=machine, f=f, delta=delta,
                              delta_k_dc=delta_k_dc, m_mismatch=m_mismatch)


def proportionalized_grid(grid: Grid, sys: ProportionalSystem) -> Grid:
    """Grid with bus parameters replaced by the exact proportional fit."""
    mach = sys.machine
    buses = []
    for i, b in enumerate(grid.buses):
        fi = float(sys.f[i])
        if isinstance(mach, TurbineMachine):
            buses.append(Bus(id=b.id, m=fi * mach.m, d=fi * mach.d,
                             r_inv=fi * mach.r_inv, tau=mach.tau, f=b.f))
        else:
            buses.append(Bus(id=b.id, m=fi * mach.m, d=fi * mach.d,
                             r_inv=b.r_inv, tau=b.tau, f=b.f))
    return Grid(name=f"{grid.name}(proportional-fit)", buses=tuple(buses),
                lines=grid.lines, per_unit_base=grid.per_unit_base)


def eval_transfer(machine: RepresentativeMachine, s: complex) -> complex:
    """Representative machine transfer function g0 at the complex point s."""
    s = complex(s)
    if isinstance(machine, SwingMachine):
        den = machine.m * s + machine.d
        scale = abs(machine.m * s) + machine.d
    else:
        m, d, r, t = machine.m, machine.d, machine.r_inv, machine.tau
        den = m * t * s * s + (m + d * t) * s + d + r
        scale = abs(m * t * s * s) + abs((m + d * t) * s) + d + r
    if abs(den) <= 1e-14 * scale:
        raise MachineError(f"transfer function evaluated at a pole: s={s}")
    if isinstance(machine, SwingMachine):
        return 1.0 / den
    return (machine.tau * s + 1.0) / den


def machine_poles(machine: RepresentativeMachine) -> np.ndarray:
    if isinstance(machine, SwingMachine):
        return np.array([-machine.d / machine.m], dtype=complex)
    m, d, r, t = machine.m, machine.d, machine.r_inv, machine.tau
    return np.roots([m * t, m + d * t, d + r]).astype(complex)


@dataclass(frozen=True)
class SprResult:
    passive: bool
    min_real_part: float
    poles: np.ndarray


def check_spr(machine: RepresentativeMachine,
              n_freqs: int = 2000) -> SprResult:
    """Strict positive-realness check by dense frequency sampling.

    Samples Re g0(j w) on a log grid over [1e-3, 1e3] rad/s and computes the
    poles exactly. Passive iff every pole is strictly stable and the sampled
    minimum real part is positive.
    """
    poles = machine_poles(machine)
    stable = bool(np.all(poles.real < 0))
    omegas = np.logspace(-3, 3, n_freqs)
    re_vals = []
    for w in omegas:
        try:
            re_vals.append(eval_transfer(machine, 1j * w).real)
        except MachineError:
            re_vals.append(-np.inf)
    min_re = float(min(re_vals))
    return SprResult(passive=stable and min_re > 0, min_real_part=min_re, poles=poles)


def realize_state_space(machine: RepresentativeMachine) -> StateSpace:
    """State-space triple whose transfer function is g0(s)/s.

    Swing model is second order, turbine third; in both the mode matrix
    a_mode(lam) closes the loop through the graph eigenvalue lam.
    """
    m, d = machine.m, machine.d
    if isinstance(machine, SwingMachine):
        a = np.array([[0.0, 1.0], [0.0, -d / m]])
        b = np.array([0.0, 1.0 / m])
        c = np.array([1.0, 0.0])
    else:
        r, t = machine.r_inv, machine.tau
        a = np.array([
            [0.0, 1.0, 0.0],
            [0.0, -d / m, 1.0 / m],
            [0.0, -r / t, -1.0 / t],
        ])
        b = np.array([0.0, 1.0 / m, 0.0])
        c = np.array([1.0, 0.0, 0.0])
    return StateSpace(a=a, b=b, c=c)


@dataclass(frozen=True)
class DampingRegime:
    """Pole classification of the representative turbine response.

    When underdamped: decay rate ``eta``, damped frequency ``omega_d``,
    numerator offset ``gamma`` and phase ``phi`` parameterize the closed-form
    step response; all are nan when overdamped.
    """

    underdamped: bool
    omega_d_sq: float
    omega_d: float
    eta: float
    gamma: float
    phi: float


def damping_regime(machine: TurbineMachine) -> DampingRegime:
    """Classify the representative turbine as under- or over-damped."""
    if not isinstance(machine, TurbineMachine):
        raise MachineError("damping regime is defined for the turbine model only")
    m, d, r, t = machine.m, machine.d, machine.r_inv, machine.tau
    omega_d_sq = (d + r) / (m * t) - 0.25 * (1.0 / t + d / m) ** 2
    if omega_d_sq <= 0:
        nan = float("nan")
        return DampingRegime(False, omega_d_sq, nan, nan, nan, nan)
    omega_d = float(np.sqrt(omega_d_sq))
    eta = 0.5 * (1.0 / t + d / m)
    gamma = 1.0 / t - r / m
    sin_phi = (m - d * t) / (2.0 * np.sqrt(m * t * r))
    phi = float(np.arcsin(sin_phi))
    # cross-check against the cosine form of the same phase
    cos_phi = omega_d / np.sqrt(omega_d_sq + (1.0 / t - eta) ** 2)
    if abs(np.cos(phi) - cos_phi) > 1e-9:
        raise MachineError("inconsistent phase between sine and cosine closed forms")
    return DampingRegime(True, omega_d_sq, omega_d, eta, gamma, phi)


def per_bus_transfer(bus: Bus, model: str, s: complex) -> complex:
    """Transfer function of one bus built from its raw parameters."""
    if model == "swing":
        return eval_transfer(SwingMachine(m=bus.m, d=bus.d), s)
    if bus.r_inv is None or bus.tau is None:
        raise GridError(f"bus {bus.id}: missing field 'r_inv'/'tau'")
    return eval_transfer(TurbineMachine(m=bus.m, d=bus.d, r_inv=bus.r_inv, tau=bus.tau), s)


__all__ = [
    "MachineError", "SwingMachine", "TurbineMachine", "RepresentativeMachine",
    "ProportionalSystem", "StateSpace", "SprResult", "DampingRegime",
    "extract_representative", "proportionalized_grid", "eval_transfer",
    "machine_poles", "check_spr", "realize_state_space", "damping_regime",
    "per_bus_transfer",
]
