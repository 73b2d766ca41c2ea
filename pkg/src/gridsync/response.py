"""Closed-form system-frequency traces and industry step metrics.

For proportional grids the rating-weighted mean of the bus frequencies (the
center-of-inertia frequency) after a step disturbance is exactly the step
response of the representative machine scaled by total disturbance over total
rating. This module evaluates that response in closed form and derives the
step metrics used in operations: steady-state deviation, Nadir (maximum
transient deviation), the time at which the Nadir occurs, and RoCoF (maximum
rate of change of frequency, attained at t -> 0+).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .machine import (DampingRegime, MachineError, ProportionalSystem,
                      SwingMachine, TurbineMachine, damping_regime,
                      realize_state_space)


@dataclass(frozen=True)
class StepScenario:
    """Step disturbance vector with cached totals."""

    u0: np.ndarray
    sum_u: float
    sum_f: float

    @staticmethod
    def from_vector(u0, f) -> "StepScenario":
        u0 = np.asarray(u0, dtype=float)
        f = np.asarray(f, dtype=float)
        if u0.shape != f.shape:
            raise ValueError(f"disturbance shape {u0.shape} != rating shape {f.shape}")
        return StepScenario(u0=u0, sum_u=float(u0.sum()), sum_f=float(f.sum()))

    @staticmethod
    def single_bus(bus: int, magnitude: float, f) -> "StepScenario":
        f = np.asarray(f, dtype=float)
        u0 = np.zeros_like(f)
        if not 0 <= bus < f.shape[0]:
            raise ValueError(f"bus index {bus} out of range for n={f.shape[0]}")
        u0[bus] = magnitude
        return StepScenario.from_vector(u0, f)


@dataclass(frozen=True)
class Trace:
    """Samples on a uniform time grid; values may be scalar or vector rows."""

    t: np.ndarray
    values: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])


def write_trace_csv(trace: Trace, path, header: str = "t,value") -> None:
    """Dump a scalar trace as two-column CSV."""
    body = np.column_stack([trace.t, trace.values])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in body:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


@dataclass(frozen=True)
class NadirResult:
    value: float
    time: float
    method: str  # "closed_form" | "numeric_trace"
    note: str = ""


def default_t_end(sys: ProportionalSystem) -> float:
    mach = sys.machine
    return max(60.0, 20.0 * mach.m / mach.d)


def steady_state_frequency(sys: ProportionalSystem, scenario: StepScenario) -> float:
    """Asymptotic system frequency: total disturbance over total damping.

    Droop adds to the effective damping for the turbine model. Independent of
    inertia in both models.
    """
    mach = sys.machine
    if isinstance(mach, TurbineMachine):
        denom = (mach.d + mach.r_inv) * scenario.sum_f
    else:
        denom = mach.d * scenario.sum_f
    if denom == 0:
        raise MachineError("zero total damping: steady-state frequency undefined")
    return scenario.sum_u / denom


def _turbine_closed_trace(w_inf: float, reg: DampingRegime, t: np.ndarray) -> np.ndarray:
    # sign of the sine term pinned by the initial slope: d/dt at 0+ must be
    # (sum u / sum m), and the peak must reproduce the Nadir closed form
    decay = np.exp(-reg.eta * t)
    osc = np.cos(reg.omega_d * t) + ((reg.gamma - reg.eta) / reg.omega_d) * np.sin(reg.omega_d * t)
    return w_inf * (1.0 - decay * osc)


def _turbine_numeric_trace(sys: ProportionalSystem, scenario: StepScenario,
                           t: np.ndarray, dt: float) -> np.ndarray:
    # step-response kernel as impulse response of the (a, b, c) realization
    ss = realize_state_space(sys.machine)
    states = _kernels.rk4_lti_trace(np.ascontiguousarray(ss.a), ss.b.copy(),
                                    np.zeros(ss.order), dt, t.shape[0] - 1)
    return (scenario.sum_u / scenario.sum_f) * (states @ ss.c)


def system_frequency_trace(sys: ProportionalSystem, scenario: StepScenario,
                           t_end: float | None = None, dt: float = 1e-3) -> Trace:
    """Sampled system frequency after the step.

    Swing and underdamped turbine use the closed forms; the overdamped
    turbine regime has no closed form here and falls back to state-space
    integration of the response kernel.
    """
    if t_end is None:
        t_end = default_t_end(sys)
    if t_end <= 0 or dt <= 0:
        raise ValueError("t_end and dt must be positive")
    n_steps = int(round(t_end / dt))
    t = np.arange(n_steps + 1) * dt
    mach = sys.machine
    w_inf = steady_state_frequency(sys, scenario)
    if isinstance(mach, SwingMachine):
        values = w_inf * (1.0 - np.exp(-(mach.d / mach.m) * t))
    else:
        reg = damping_regime(mach)
        if reg.underdamped:
            values = _turbine_closed_trace(w_inf, reg, t)
        else:
            values = _turbine_numeric_trace(sys, scenario, t, dt)
    return Trace(t=t, values=values)


def nadir(sys: ProportionalSystem, scenario: StepScenario,
          t_end: float | None = None, dt: float = 1e-3) -> NadirResult:
    """Maximum transient deviation of the system frequency (turbine model).

    Underdamped: closed form, with the peak at the first zero of the response
    derivative. Overdamped: maximum of the numerically integrated trace,
    tagged as such (no closed form is available in that regime).
    """
    mach = sys.machine
    if not isinstance(mach, TurbineMachine):
        raise MachineError("nadir is defined for the turbine model; swing has no overshoot")
    reg = damping_regime(mach)
    if reg.underdamped:
        t_peak = (reg.phi + 0.5 * math.pi) / reg.omega_d
        amp = abs(scenario.sum_u) / scenario.sum_f / (mach.d + mach.r_inv)
        value = amp * (1.0 + math.sqrt(mach.tau * mach.r_inv / mach.m)
                       * math.exp(-(reg.eta / reg.omega_d) * (reg.phi + 0.5 * math.pi)))
        return NadirResult(value=value, time=t_peak, method="closed_form")
    trace = system_frequency_trace(sys, scenario, t_end=t_end, dt=dt)
    idx = int(np.argmax(np.abs(trace.values)))
    return NadirResult(value=float(abs(trace.values[idx])), time=float(trace.t[idx]),
                       method="numeric_trace",
                       note="overdamped regime: no closed form, numeric trace maximum used")


def rocof(sys: ProportionalSystem, scenario: StepScenario) -> float:
    """Maximum rate of change of the system frequency, |sum u| / sum m."""
    return abs(scenario.sum_u) / (sys.machine.m * scenario.sum_f)


def swing_overshoot_check(sys: ProportionalSystem, scenario: StepScenario,
                          t_end: float | None = None, dt: float = 1e-3) -> bool:
    """True iff the first-order trace never exceeds its steady-state value."""
    if not isinstance(sys.machine, SwingMachine):
        raise MachineError("overshoot check applies to the swing model only")
    trace = system_frequency_trace(sys, scenario, t_end=t_end, dt=dt)
    w_inf = abs(steady_state_frequency(sys, scenario))
    overshoot = float(np.max(np.abs(trace.values))) - w_inf
    return overshoot <= 1e-9 * max(w_inf, 1e-300)
