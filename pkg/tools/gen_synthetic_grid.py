#!/usr/bin/env python3
"""Regenerate the bundled grids in src/gridsync/data/.

The 35-bus grid is a ring with chords, log-uniform machine sizes and mildly
non-proportional damping/droop/turbine constants. All draws are seeded so the
artifact is reproducible bit for bit.
"""

import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "gridsync" / "data"

N = 35
SEED = 20240817
WEIGHT_SCALE = 2.5


def ring35() -> dict:
    rng = np.random.default_rng(SEED)
    m = np.exp(rng.uniform(np.log(0.4), np.log(4.0), N))
    d = 0.55 * m * np.exp(rng.uniform(-0.25, 0.25, N))
    r_inv = 0.85 * m * np.exp(rng.uniform(-0.25, 0.25, N))
    tau = rng.uniform(0.35, 0.65, N)

    lines = []
    for i in range(N):
        lines.append((i, (i + 1) % N))
    for i in range(0, N, 4):
        lines.append((i, (i + 7) % N))
    lines = sorted({tuple(sorted(p)) for p in lines})
    weights = WEIGHT_SCALE * rng.uniform(0.7, 1.5, len(lines))

    return {
        "schema": "gridsync-grid/1",
        "name": "ring35",
        "per_unit_base": "synthetic; machine and line quantities in a common per-unit system",
        "buses": [
            {"id": i, "m": round(float(m[i]), 6), "d": round(float(d[i]), 6),
             "r_inv": round(float(r_inv[i]), 6), "tau": round(float(tau[i]), 6)}
            for i in range(N)
        ],
        "lines": [
            {"from": int(a), "to": int(b), "weight": round(float(w), 6)}
            for (a, b), w in zip(lines, weights)
        ],
    }


def twobus() -> dict:
    return {
        "schema": "gridsync-grid/1",
        "name": "twobus",
        "per_unit_base": "unit parameters for hand calculations",
        "buses": [
            {"id": 0, "m": 1.0, "d": 1.0, "r_inv": 1.0, "tau": 1.0},
            {"id": 1, "m": 1.0, "d": 1.0, "r_inv": 1.0, "tau": 1.0},
        ],
        "lines": [{"from": 0, "to": 1, "weight": 1.0}],
    }


def threebus_path() -> dict:
    return {
        "schema": "gridsync-grid/1",
        "name": "threebus_path",
        "per_unit_base": "unit parameters for hand calculations",
        "buses": [
            {"id": i, "m": 1.0, "d": 1.0, "r_inv": 1.0, "tau": 1.0}
            for i in range(3)
        ],
        "lines": [
            {"from": 0, "to": 1, "weight": 1.0},
            {"from": 1, "to": 2, "weight": 1.0},
        ],
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for builder in (ring35, twobus, threebus_path):
        doc = builder()
        path = OUT / f"{doc['name']}.json"
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
