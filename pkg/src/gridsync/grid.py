"""Network data model: buses, lines, Laplacian construction.

A grid is a connected, undirected, weighted graph over generator buses. Each
bus carries machine parameters (inertia ``m``, damping ``d``, and optionally
inverse droop ``r_inv`` and turbine time constant ``tau``); each line carries
a positive electrical coupling weight. Line weights may be given directly or
as raw quantities (susceptance, voltage magnitudes, equilibrium angle
difference), in which case the weight ``|V_i||V_j| b cos(angle)`` is computed
at load time so downstream code only ever sees weights.

Grids are immutable after load and safe to share across parallel workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

GRID_SCHEMA = "gridsync-grid/1"


class GridError(ValueError):
    """Raised for malformed grid files or invariant violations."""


@dataclass(frozen=True)
class Bus:
    """One generator bus.

    ``r_inv`` and ``tau`` are optional: absent for swing-only studies.
    ``f`` optionally overrides the inertia-derived rating.
    """

    id: int
    m: float
    d: float
    r_inv: float | None = None
    tau: float | None = None
    f: float | None = None

    def __post_init__(self):
        if not (self.m > 0):
            raise GridError(f"bus {self.id}: nonpositive inertia m={self.m}")
        if not (self.d > 0):
            raise GridError(f"bus {self.id}: nonpositive damping d={self.d}")
        if self.r_inv is not None and self.r_inv < 0:
            raise GridError(f"bus {self.id}: negative inverse droop r_inv={self.r_inv}")
        if self.tau is not None and not (self.tau > 0):
            raise GridError(f"bus {self.id}: nonpositive turbine time constant tau={self.tau}")
        if self.f is not None and not (self.f > 0):
            raise GridError(f"bus {self.id}: nonpositive rating f={self.f}")


@dataclass(frozen=True)
class Line:
    """Undirected line between two buses with a positive coupling weight."""

    from_bus: int
    to_bus: int
    weight: float

    def __post_init__(self):
        if self.from_bus == self.to_bus:
            raise GridError(f"line ({self.from_bus},{self.to_bus}): self-loop")
        if not (self.weight > 0):
            raise GridError(
                f"line ({self.from_bus},{self.to_bus}): nonpositive line weight {self.weight}"
            )

    @property
    def key(self) -> frozenset:
        return frozenset((self.from_bus, self.to_bus))


@dataclass(frozen=True)
class Grid:
    """Validated network: ordered buses, deduplicated lines, connected graph."""

    name: str
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    per_unit_base: str = ""

    @property
    def n(self) -> int:
        return len(self.buses)

    def bus_array(self, attr: str) -> np.ndarray:
        """Per-bus parameter vector; raises if the field is missing anywhere."""
        vals = []
        for b in self.buses:
            v = getattr(b, attr)
            if v is None:
                raise GridError(f"bus {b.id}: missing field '{attr}'")
            vals.append(v)
        return np.asarray(vals, dtype=float)

    def has_turbine_fields(self) -> bool:
        return all(b.r_inv is not None and b.tau is not None for b in self.buses)


def _check_connected(n: int, lines) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for ln in lines:
        adj[ln.from_bus].append(ln.to_bus)
        adj[ln.to_bus].append(ln.from_bus)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                stack.append(j)
    return all(seen)


def _line_from_dict(entry: dict, idx: int) -> Line:
    try:
        i = int(entry["from"])
        j = int(entry["to"])
    except KeyError as exc:
        raise GridError(f"line #{idx}: missing field {exc}") from None
    if "weight" in entry:
        w = float(entry["weight"])
    else:
        missing = [k for k in ("b", "v_from", "v_to", "theta0_diff") if k not in entry]
        if missing:
            raise GridError(f"line #{idx}: missing fields {missing} (need weight or raw quadruple)")
        theta = float(entry["theta0_diff"])
        if not abs(theta) < math.pi / 2:
            raise GridError(f"line #{idx}: |theta0_diff|={abs(theta):.4f} not below pi/2")
        w = float(entry["v_from"]) * float(entry["v_to"]) * float(entry["b"]) * math.cos(theta)
    return Line(from_bus=i, to_bus=j, weight=w)


def validate_grid(name: str, buses: list[Bus], lines: list[Line],
                  per_unit_base: str = "") -> Grid:
    """Assemble a Grid, enforcing every structural invariant."""
    n = len(buses)
    if n < 2:
        raise GridError(f"grid '{name}': needs at least 2 buses, got {n}")
    for pos, b in enumerate(buses):
        if b.id != pos:
            raise GridError(f"bus at position {pos} has id {b.id}; file order fixes index order")
    seen_pairs = set()
    for ln in lines:
        if not (0 <= ln.from_bus < n and 0 <= ln.to_bus < n):
            raise GridError(f"line ({ln.from_bus},{ln.to_bus}): endpoint out of range")
        if ln.key in seen_pairs:
            raise GridError(f"duplicate line between buses {ln.from_bus} and {ln.to_bus}")
        seen_pairs.add(ln.key)
    if not _check_connected(n, lines):
        raise GridError(f"grid '{name}': disconnected graph")
    return Grid(name=name, buses=tuple(buses), lines=tuple(lines),
                per_unit_base=per_unit_base)


def load_grid(path) -> Grid:
    """Load and validate a grid JSON file (schema ``gridsync-grid/1``)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise GridError(f"cannot parse grid file {path}: {exc}") from None
    if doc.get("schema", GRID_SCHEMA) != GRID_SCHEMA:
        raise GridError(f"unsupported schema '{doc.get('schema')}', expected '{GRID_SCHEMA}'")
    name = doc.get("name", "unnamed")
    raw_buses = doc.get("buses")
    raw_lines = doc.get("lines")
    if not isinstance(raw_buses, list) or not isinstance(raw_lines, list):
        raise GridError(f"grid '{name}': 'buses' and 'lines' must be lists")
    buses = []
    for pos, entry in enumerate(raw_buses):
        try:
            buses.append(Bus(
                id=int(entry.get("id", pos)),
                m=float(entry["m"]),
                d=float(entry["d"]),
                r_inv=None if entry.get("r_inv") is None else float(entry["r_inv"]),
                tau=None if entry.get("tau") is None else float(entry["tau"]),
                f=None if entry.get("f") is None else float(entry["f"]),
            ))
        except KeyError as exc:
            raise GridError(f"bus #{pos}: missing field {exc}") from None
    lines = [_line_from_dict(entry, idx) for idx, entry in enumerate(raw_lines)]
    return validate_grid(name, buses, lines, doc.get("per_unit_base", ""))


def grid_to_dict(grid: Grid) -> dict:
    """Round-trippable JSON representation of a grid."""
    buses = []
    for b in grid.buses:
        entry: dict = {"id": b.id, "m": b.m, "d": b.d}
        if b.r_inv is not None:
            entry["r_inv"] = b.r_inv
        if b.tau is not None:
            entry["tau"] = b.tau
        if b.f is not None:
            entry["f"] = b.f
        buses.append(entry)
    return {
        "schema": GRID_SCHEMA,
        "name": grid.name,
        "per_unit_base": grid.per_unit_base,
        "buses": buses,
        "lines": [{"from": ln.from_bus, "to": ln.to_bus, "weight": ln.weight}
                  for ln in grid.lines],
    }


def save_grid(grid: Grid, path) -> None:
    with open(path, "w") as fh:
        json.dump(grid_to_dict(grid), fh, indent=1)
        fh.write("\n")


def build_laplacian(grid: Grid) -> np.ndarray:
    """Weighted graph Laplacian; rows sum to zero by construction."""
    n = grid.n
    lap = np.zeros((n, n))
    for ln in grid.lines:
        i, j, w = ln.from_bus, ln.to_bus, ln.weight
        lap[i, j] -= w
        lap[j, i] -= w
    for i in range(n):
        lap[i, i] = -lap[i].sum()  # diagonal still zero here
    return lap


def scaled_laplacian(lap: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Rating-normalized coupling matrix F^{-1/2} L F^{-1/2}."""
    f = np.asarray(f, dtype=float)
    bad = np.nonzero(~(f > 0))[0]
    if bad.size:
        raise GridError(f"bus {bad[0]}: nonpositive rating f={f[bad[0]]}")
    s = 1.0 / np.sqrt(f)
    return lap * np.outer(s, s)


def add_random_lines(grid: Grid, k: int, seed: int) -> Grid:
    """Add ``k`` lines between uniformly sampled non-adjacent bus pairs.

    New weights are drawn uniformly between the minimum and maximum existing
    line weights of the input grid. Deterministic for a fixed seed; pairs are
    sampled without replacement.
    """
    if k == 0:
        return grid
    existing = {ln.key for ln in grid.lines}
    absent = [(i, j) for i in range(grid.n) for j in range(i + 1, grid.n)
              if frozenset((i, j)) not in existing]
    if k > len(absent):
        raise GridError(f"cannot add {k} lines: only {len(absent)} absent bus pairs")
    weights = [ln.weight for ln in grid.lines]
    w_lo, w_hi = min(weights), max(weights)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(absent), size=k, replace=False)
    new_w = rng.uniform(w_lo, w_hi, size=k)
    new_lines = list(grid.lines)
    for idx, w in zip(chosen, new_w):
        i, j = absent[int(idx)]
        new_lines.append(Line(from_bus=i, to_bus=j, weight=float(w)))
    return replace(grid, lines=tuple(new_lines),
                   name=f"{grid.name}+{k}@seed{seed}")
