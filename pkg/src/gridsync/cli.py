"""Command-line front end.

Subcommands: ``analyze`` (closed-form metric report with cross-checks),
``simulate`` (time-domain trace and empirical metrics), ``sweep`` (parameter
sweeps of any metric), ``connectivity`` (random line-addition experiment)
and ``selftest`` (closed-form vs Sylvester vs simulator consistency table).

Exit codes: 0 success, 2 validation error, 3 cross-check residual beyond
tolerance (the report is still emitted).

Conventions: all quantities are in system per-unit; disturbance magnitudes
are signed, negative meaning a load increase.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys as _sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from ._accel import backend_name
from .grid import GridError, build_laplacian, load_grid, scaled_laplacian
from .machine import (MachineError, ProportionalSystem, SwingMachine,
                      TurbineMachine, extract_representative,
                      proportionalized_grid)
from .oracle import (OracleError, assemble_dynamics, empirical_metrics,
                     initial_rocof, integrate_step_response,
                     slowest_decay_rate)
from .response import (NadirResult, StepScenario, default_t_end, nadir, rocof,
                       steady_state_frequency, system_frequency_trace,
                       write_trace_csv)
from .robustness import RobustnessError, connectivity_gap
from .spectral import SpectralError, modal_decompose
from .synccost import (build_cost_matrix, inner_product_swing_closed,
                       inner_product_sylvester, inner_product_turbine_closed,
                       hnorm_turbine_closed, mean_sync_cost, sync_cost)

REPORT_SCHEMA = "gridsync-report/1"

# cross-check gates; a residual beyond its gate flips the exit code to 3
TOL_SYLVESTER_REL = 1e-9
TOL_COST_ORACLE_REL = 1e-2
TOL_COI_SUP_REL = 1e-4
TOL_ROCOF_REL = 5e-3
TOL_NADIR_REL = 1e-3
TOL_STEADY_REL = 1e-5


class CliError(ValueError):
    pass


# ---------------------------------------------------------------------------
# canonical JSON (17 significant digits, sorted keys -> byte-stable reports)
# ---------------------------------------------------------------------------

def _fmt_scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    return json.dumps(x)


def canonical_json(obj, indent: int = 0) -> str:
    nl = "\n" + " " * (indent + 1)
    close = "\n" + " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {canonical_json(v, indent + 1)}"
                 for k, v in sorted(obj.items())]
        return "{" + nl + ("," + nl).join(items) + close + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [canonical_json(v, indent + 1) for v in obj]
        return "[" + nl + ("," + nl).join(items) + close + "]"
    return _fmt_scalar(obj)


# ---------------------------------------------------------------------------
# flag parsing helpers
# ---------------------------------------------------------------------------

def _parse_step(spec: str, n: int) -> tuple[int, float]:
    fields = dict(part.split("=", 1) for part in spec.split(",") if "=" in part)
    try:
        bus = int(fields["bus"])
        mag = float(fields["mag"])
    except (KeyError, ValueError):
        raise CliError(f"--step must look like 'bus=<id>,mag=<value>', got '{spec}'") from None
    if not 0 <= bus < n:
        raise CliError(f"--step bus {bus} out of range for n={n}")
    return bus, mag


def _parse_range(spec: str) -> np.ndarray:
    try:
        lo, hi, steps = spec.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise CliError(f"--range must look like 'lo:hi:steps', got '{spec}'") from None
    if steps < 1:
        raise CliError("--range needs at least one step")
    return np.linspace(lo, hi, steps)


def _flatten(obj, prefix="") -> dict:
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}." if prefix else f"{k}."))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            out.update(_flatten(v, f"{prefix}{i}."))
    else:
        out[prefix[:-1]] = obj
    return out


def _write_text(text: str, out: str | None) -> None:
    if out in (None, "-"):
        _sys.stdout.write(text)
        if not text.endswith("\n"):
            _sys.stdout.write("\n")
    else:
        with open(out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _prepare(args):
    grid = load_grid(args.grid)
    sys = extract_representative(grid, args.model)
    basis = modal_decompose(
        scaled_laplacian(build_laplacian(grid), sys.f), sys.f)
    return grid, sys, basis


def _fit_summary(sys: ProportionalSystem) -> dict:
    mach = sys.machine
    out = {
        "m": mach.m, "d": mach.d, "sum_f": sys.sum_f,
        "f_min": float(sys.f.min()), "f_max": float(sys.f.max()),
        "max_delta_over_d": float(np.abs(sys.delta).max() / abs(mach.d)),
    }
    if isinstance(mach, TurbineMachine):
        out["r_inv"] = mach.r_inv
        out["tau"] = mach.tau
    return out


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def _closed_form_nadir(sys: ProportionalSystem, scenario: StepScenario) -> NadirResult:
    if isinstance(sys.machine, SwingMachine):
        w_inf = steady_state_frequency(sys, scenario)
        return NadirResult(value=abs(w_inf), time=float("nan"), method="closed_form",
                           note="monotone first-order response; supremum is the steady state")
    return nadir(sys, scenario)


def cmd_analyze(args) -> int:
    grid, sys, basis = _prepare(args)
    if (args.step is None) == (args.sigma is None):
        raise CliError("analyze needs exactly one of --step or --sigma")
    dt = args.dt
    t_end = args.t_end if args.t_end is not None else default_t_end(sys)

    report: dict = {
        "schema": REPORT_SCHEMA,
        "scenario": {"grid": grid.name, "n": grid.n, "model": args.model},
        "fit": _fit_summary(sys),
        "metrics": {},
        "cross_checks": {},
        "provenance": {"version": __version__, "seed": args.seed, "dt": dt,
                       "t_end": t_end, "kernel_backend": backend_name()},
    }
    failures: list[str] = []

    if args.sigma is not None:
        report["scenario"]["disturbance"] = {"type": "covariance", "preset": args.sigma}
        closed = mean_sync_cost(basis, sys.machine, args.sigma, method="closed_form")
        sylv = mean_sync_cost(basis, sys.machine, args.sigma, method="sylvester")
        resid = abs(closed - sylv) / max(abs(sylv), 1e-300)
        report["metrics"]["mean_sync_cost"] = {
            "value": closed, "method": "closed_form", "sylvester_residual": resid}
        if resid > TOL_SYLVESTER_REL:
            failures.append(f"mean_sync_cost sylvester residual {resid:.3e}")
    else:
        bus, mag = _parse_step(args.step, grid.n)
        report["scenario"]["disturbance"] = {"type": "step", "bus": bus, "magnitude": mag}
        scenario = StepScenario.single_bus(bus, mag, sys.f)

        w_inf = steady_state_frequency(sys, scenario)
        nad = _closed_form_nadir(sys, scenario)
        roc = rocof(sys, scenario)
        cost_closed = sync_cost(basis, sys.machine, scenario.u0, method="closed_form")
        cost_sylv = sync_cost(basis, sys.machine, scenario.u0, method="sylvester")
        cost = cost_sylv if args.method == "sylvester" else cost_closed
        resid_sylv = abs(cost_closed - cost_sylv) / max(abs(cost_sylv), 1e-300)
        if resid_sylv > TOL_SYLVESTER_REL:
            failures.append(f"sync_cost sylvester residual {resid_sylv:.3e}")

        # cross-check every closed form against the simulator on the fitted grid
        prop = proportionalized_grid(grid, sys)
        model_ss = assemble_dynamics(prop, args.model)
        trace = integrate_step_response(model_ss, scenario.u0, dt=dt, t_end=t_end)
        emp = empirical_metrics(trace, sys.f, model_ss.m_vec,
                                decay_rate=slowest_decay_rate(model_ss))
        closed_trace = system_frequency_trace(sys, scenario, t_end=t_end, dt=dt)
        if args.trace_out:
            write_trace_csv(closed_trace, args.trace_out)
        coi_sup = float(np.abs(closed_trace.values - emp.coi).max())
        coi_resid = coi_sup / max(abs(w_inf), 1e-300)
        roc_oracle = initial_rocof(model_ss, scenario.u0)
        roc_resid = abs(roc - roc_oracle) / max(roc_oracle, 1e-300)
        cost_resid = abs(cost - emp.l2_cost) / max(emp.l2_cost, 1e-300)
        nadir_resid = abs(nad.value - emp.nadir) / max(emp.nadir, 1e-300)
        steady_resid = abs(w_inf - emp.steady_state) / max(abs(w_inf), 1e-300)

        report["metrics"]["steady_state"] = {
            "value": w_inf, "method": "closed_form", "oracle_residual": steady_resid}
        report["metrics"]["nadir"] = {
            "value": nad.value,
            "time": None if math.isnan(nad.time) else nad.time,
            "method": nad.method, "note": nad.note, "oracle_residual": nadir_resid}
        report["metrics"]["rocof"] = {
            "value": roc, "method": "closed_form", "oracle_residual": roc_resid}
        report["metrics"]["sync_cost"] = {
            "value": cost, "method": args.method,
            "sylvester_residual": resid_sylv, "oracle_residual": cost_resid}
        report["cross_checks"]["coi_sup_residual"] = coi_resid
        report["cross_checks"]["oracle_settled"] = emp.settled

        if coi_resid > TOL_COI_SUP_REL:
            failures.append(f"coi trace residual {coi_resid:.3e}")
        if roc_resid > TOL_ROCOF_REL:
            failures.append(f"rocof residual {roc_resid:.3e}")
        if cost_resid > TOL_COST_ORACLE_REL:
            failures.append(f"sync_cost oracle residual {cost_resid:.3e}")
        if nadir_resid > TOL_NADIR_REL:
            failures.append(f"nadir residual {nadir_resid:.3e}")
        if emp.settled and steady_resid > TOL_STEADY_REL:
            failures.append(f"steady-state residual {steady_resid:.3e}")

    if args.dump_cost_matrix:
        y = build_cost_matrix(basis, sys.machine).y
        with open(args.dump_cost_matrix, "w") as fh:
            for row in y:
                fh.write(",".join(format(v, ".17g") for v in row) + "\n")

    report["cross_checks"]["within_tolerance"] = not failures
    if failures:
        report["cross_checks"]["failures"] = failures
    if args.format == "csv":
        _write_text("\n".join(f"{k},{_fmt_scalar(v)}" for k, v in
                              sorted(_flatten(report).items())), args.out)
    else:
        _write_text(canonical_json(report), args.out)
    if failures:
        print("cross-check failures: " + "; ".join(failures), file=_sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    grid = load_grid(args.grid)
    sys = extract_representative(grid, args.model)
    bus, mag = _parse_step(args.step, grid.n)
    scenario = StepScenario.single_bus(bus, mag, sys.f)
    sim_grid = grid if args.true_params else proportionalized_grid(grid, sys)
    model = assemble_dynamics(sim_grid, args.model)
    dt = args.dt
    t_end = args.t_end if args.t_end is not None else default_t_end(sys)
    trace = integrate_step_response(model, scenario.u0, dt=dt, t_end=t_end)
    emp = empirical_metrics(trace, sys.f, model.m_vec,
                            decay_rate=slowest_decay_rate(model))

    n = grid.n
    cols = [f"theta_{i+1}" for i in range(n)] + [f"w_{i+1}" for i in range(n)]
    if args.model == "turbine":
        cols += [f"q_{i+1}" for i in range(n)]
    cols += ["w_bar"] + [f"wtilde_{i+1}" for i in range(n)]
    header = "t," + ",".join(cols)
    body = np.column_stack([trace.t, trace.states, emp.coi, emp.wtilde])
    lines = [header]
    for row in body:
        lines.append(",".join(format(v, ".17g") for v in row))
    _write_text("\n".join(lines), args.out)

    metrics = {
        "schema": REPORT_SCHEMA,
        "scenario": {"grid": sim_grid.name, "n": n, "model": args.model,
                     "true_params": bool(args.true_params),
                     "disturbance": {"type": "step", "bus": bus, "magnitude": mag}},
        "metrics": {
            "l2_cost": {"value": emp.l2_cost, "method": "oracle",
                        "tail_bound": emp.l2_cost_tail_bound},
            "nadir": {"value": emp.nadir, "time": emp.nadir_time, "method": "oracle"},
            "rocof": {"value": emp.rocof, "method": "oracle"},
            "steady_state": {"value": emp.steady_state, "method": "oracle",
                             "settled": emp.settled},
        },
        "provenance": {"version": __version__, "seed": args.seed, "dt": dt,
                       "t_end": t_end, "kernel_backend": backend_name()},
    }
    _write_text(canonical_json(metrics), args.metrics_out)
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

_SWEEPABLE = ("m", "d", "r_inv", "tau")
_METRICS = ("sync_cost", "mean_sync_cost", "nadir", "rocof", "w_inf")


def _metric_value(metric: str, sys: ProportionalSystem, basis,
                  scenario: StepScenario | None, sigma: str | None) -> float:
    if metric == "sync_cost":
        return sync_cost(basis, sys.machine, scenario.u0)
    if metric == "mean_sync_cost":
        return mean_sync_cost(basis, sys.machine, sigma)
    if metric == "nadir":
        return _closed_form_nadir(sys, scenario).value
    if metric == "rocof":
        return rocof(sys, scenario)
    return steady_state_frequency(sys, scenario)


def cmd_sweep(args) -> int:
    grid, sys, basis = _prepare(args)
    if args.metric not in _METRICS:
        raise CliError(f"unknown metric '{args.metric}', expected one of {_METRICS}")
    if args.param not in _SWEEPABLE:
        raise CliError(f"unknown parameter '{args.param}', expected one of {_SWEEPABLE}")
    if isinstance(sys.machine, SwingMachine) and args.param in ("r_inv", "tau"):
        raise CliError(f"parameter '{args.param}' does not exist on the swing model")
    if args.metric == "mean_sync_cost":
        if args.sigma is None:
            raise CliError("--sigma preset required for the mean cost metric")
        scenario = None
    else:
        if args.step is None:
            raise CliError(f"--step required for metric '{args.metric}'")
        bus, mag = _parse_step(args.step, grid.n)
        scenario = StepScenario.single_bus(bus, mag, sys.f)

    values1 = _parse_range(args.range)
    two_d = args.param2 is not None
    if two_d:
        if args.param2 not in _SWEEPABLE:
            raise CliError(f"unknown parameter '{args.param2}'")
        if args.range2 is None:
            raise CliError("--range2 required with --param2")
        values2 = _parse_range(args.range2)
    else:
        values2 = np.array([None])

    # ratings are held fixed, so the eigenbasis is computed once and reused;
    # only the representative machine parameters vary across the sweep
    rows = []
    header = [args.param] + ([args.param2] if two_d else []) + [args.metric]
    for v1 in values1:
        for v2 in values2:
            updates = {args.param: float(v1)}
            if two_d:
                updates[args.param2] = float(v2)
            mach = dataclasses.replace(sys.machine, **updates)
            sys_pt = dataclasses.replace(sys, machine=mach)
            val = _metric_value(args.metric, sys_pt, basis, scenario, args.sigma)
            row = [v1] + ([v2] if two_d else []) + [val]
            rows.append(",".join(format(float(x), ".17g") for x in row))
    _write_text("\n".join([",".join(header)] + rows), args.out)
    return 0


# ---------------------------------------------------------------------------
# connectivity
# ---------------------------------------------------------------------------

def cmd_connectivity(args) -> int:
    grid = load_grid(args.grid)
    if args.seeds < 1:
        raise CliError("--seeds must be at least 1")
    try:
        schedule = tuple(int(x) for x in args.k_schedule.split(","))
    except ValueError:
        raise CliError(f"bad --k-schedule '{args.k_schedule}'") from None
    sys = extract_representative(grid, args.model)
    bus, mag = _parse_step(args.step, grid.n)
    scenario = StepScenario.single_bus(bus, mag, sys.f)
    seeds = [args.seed + i for i in range(args.seeds)]
    t_end = args.t_end if args.t_end is not None else default_t_end(sys)

    if args.jobs > 1:
        def one(k):
            return connectivity_gap(grid, args.model, scenario.u0,
                                    omega_max=args.omega_max, k_schedule=(k,),
                                    seeds=seeds, dt=args.dt, t_end=t_end)
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(one, schedule))
        rows = [r for chunk in chunks for r in chunk]
    else:
        rows = connectivity_gap(grid, args.model, scenario.u0,
                                omega_max=args.omega_max, k_schedule=schedule,
                                seeds=seeds, dt=args.dt, t_end=t_end)

    out_lines = ["k,seed,lambda1,freq_gap,cost_true,cost_prop,rel_err"]
    for r in rows:
        out_lines.append(f"{r.k},{r.seed}," + ",".join(
            format(v, ".17g") for v in (r.lambda1, r.freq_gap, r.cost_true,
                                        r.cost_prop, r.rel_err)))
    for k in schedule:
        sub = [r for r in rows if r.k == k]
        means = [float(np.mean([getattr(r, name) for r in sub]))
                 for name in ("lambda1", "freq_gap", "cost_true", "cost_prop", "rel_err")]
        out_lines.append(f"{k},mean," + ",".join(format(v, ".17g") for v in means))
    _write_text("\n".join(out_lines), args.out)
    return 0


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

def _selftest_closed_vs_sylvester(n_draws: int = 200, seed: int = 0):
    rng = np.random.default_rng(seed)

    def draw_params(size):
        return np.exp(rng.uniform(np.log(0.1), np.log(10.0), size))

    def draw_lams(size):
        return np.exp(rng.uniform(np.log(0.01), np.log(100.0), size))

    worst = {"swing_cross": 0.0, "turbine_norm": 0.0, "turbine_cross": 0.0}
    for _ in range(n_draws):
        m, d, r, t = draw_params(4)
        lk, ll = draw_lams(2)
        ref = inner_product_sylvester(SwingMachine(m, d), lk, ll)
        got = inner_product_swing_closed(m, d, lk, ll)
        worst["swing_cross"] = max(worst["swing_cross"], abs(got - ref) / abs(ref))
        mach = TurbineMachine(m, d, r, t)
        ref = inner_product_sylvester(mach, lk, lk)
        got = hnorm_turbine_closed(m, d, r, t, lk)
        worst["turbine_norm"] = max(worst["turbine_norm"], abs(got - ref) / abs(ref))
        ref = inner_product_sylvester(mach, lk, ll)
        got = inner_product_turbine_closed(m, d, r, t, lk, ll)
        worst["turbine_cross"] = max(worst["turbine_cross"], abs(got - ref) / abs(ref))
    return worst


def cmd_selftest(args) -> int:
    checks: list[tuple[str, float, float]] = []
    worst = _selftest_closed_vs_sylvester(seed=args.seed)
    for name, err in worst.items():
        checks.append((f"closed-vs-sylvester {name}", err, TOL_SYLVESTER_REL))

    from . import bundled_grid_path

    grid = load_grid(str(bundled_grid_path("twobus")))
    for model in ("swing", "turbine"):
        sys = extract_representative(grid, model)
        basis = modal_decompose(
            scaled_laplacian(build_laplacian(grid), sys.f), sys.f)
        scenario = StepScenario.single_bus(0, 1.0, sys.f)
        full = assemble_dynamics(grid, model)
        trace = integrate_step_response(full, scenario.u0, dt=1e-3, t_end=60.0)
        emp = empirical_metrics(trace, sys.f, full.m_vec,
                                decay_rate=slowest_decay_rate(full))
        cost = sync_cost(basis, sys.machine, scenario.u0)
        checks.append((f"{model} cost oracle residual",
                       abs(cost - emp.l2_cost) / emp.l2_cost, TOL_COST_ORACLE_REL))
        closed = system_frequency_trace(sys, scenario, t_end=60.0, dt=1e-3)
        w_inf = steady_state_frequency(sys, scenario)
        checks.append((f"{model} coi sup residual",
                       float(np.abs(closed.values - emp.coi).max()) / abs(w_inf),
                       TOL_COI_SUP_REL))

    bad = 0
    print(f"{'check':44s} {'residual':>12s} {'tolerance':>10s}  status")
    for name, err, tol in checks:
        ok = err <= tol
        bad += 0 if ok else 1
        print(f"{name:44s} {err:12.3e} {tol:10.1e}  {'pass' if ok else 'FAIL'}")
    return 0 if bad == 0 else 3


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridsync",
        description="Synchronization metrics for linearized power networks. "
                    "All quantities are in system per-unit; step magnitudes are "
                    "signed (negative = load increase).")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=0, help="base RNG seed")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="report format for analyze (json default, csv flattens to "
                             "key,value rows); tabular commands always emit csv")

    model_grid = argparse.ArgumentParser(add_help=False)
    model_grid.add_argument("--grid", required=True, help="grid JSON path")
    model_grid.add_argument("--model", required=True, choices=("swing", "turbine"))

    p = sub.add_parser("analyze", parents=[common, model_grid],
                       help="closed-form metric report with cross-checks")
    p.add_argument("--step", default=None, help="'bus=<id>,mag=<value>'")
    p.add_argument("--sigma", default=None, choices=("I", "F", "F2"),
                   help="disturbance covariance preset for the mean cost")
    p.add_argument("--method", default="closed_form", choices=("closed_form", "sylvester"))
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--trace-out", default=None,
                   help="also write the closed-form system-frequency trace CSV")
    p.add_argument("--dump-cost-matrix", default=None,
                   help="also write the weighted inner-product matrix as CSV")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", parents=[common, model_grid],
                       help="time-domain trace CSV plus empirical metrics JSON")
    p.add_argument("--step", required=True, help="'bus=<id>,mag=<value>'")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--true-params", action="store_true",
                   help="simulate raw bus parameters instead of the proportional fit")
    p.add_argument("--metrics-out", default=None, help="metrics JSON file (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common, model_grid],
                       help="CSV sweep of a metric over representative parameters")
    p.add_argument("--param", required=True)
    p.add_argument("--range", required=True, help="'lo:hi:steps'")
    p.add_argument("--param2", default=None)
    p.add_argument("--range2", default=None)
    p.add_argument("--metric", required=True)
    p.add_argument("--step", default=None)
    p.add_argument("--sigma", default=None, choices=("I", "F", "F2"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("connectivity", parents=[common, model_grid],
                       help="random line-addition experiment table")
    p.add_argument("--step", required=True)
    p.add_argument("--k-schedule", default="0,25,50,200,500")
    p.add_argument("--seeds", type=int, default=10, help="number of seeds per k")
    p.add_argument("--omega-max", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_connectivity)

    p = sub.add_parser("selftest", parents=[common],
                       help="closed-form vs Sylvester vs simulator consistency table")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, GridError, MachineError, SpectralError, OracleError,
            RobustnessError, ValueError) as exc:
        print(f"gridsync: error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
