#!/usr/bin/env python3
"""Benchmark the numba kernel builds against the pure-numpy fallbacks.

Times the two hot paths on realistic workloads:

* RK4 step-response integration of the bundled 35-bus grid (both machine
  models, 60 s at dt=1e-3, the acceptance-suite workload), and
* Gram-matrix assembly over the modal eigenvalue pairs for a range of
  network sizes.

The active build is whatever ``gridsync`` picked at import time; the numpy
side is always the explicit fallback implementation, so the comparison is
meaningful both with and without GRIDSYNC_NO_NUMBA=1.
"""

import time

import numpy as np

import gridsync as gs
from gridsync import _kernels
from gridsync._kernels import (_rk4_lti_impl, _swing_gram_numpy,
                               _turbine_gram_numpy)


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_rk4():
    grid = gs.load_grid(gs.bundled_grid_path("ring35"))
    print(f"RK4 trace, {grid.n}-bus grid, dt=1e-3, t_end=60 s")
    print(f"{'model':10s} {'dim':>4s} {'active (' + gs.backend_name() + ')':>16s} "
          f"{'numpy':>10s} {'speedup':>8s}")
    for model in ("swing", "turbine"):
        full = gs.assemble_dynamics(grid, model)
        u0 = np.zeros(grid.n)
        u0[2] = -3.0
        c = full.input_map @ u0
        a = np.ascontiguousarray(full.a)
        x0 = np.zeros(full.dim)
        n_steps = 60_000
        _kernels.rk4_lti_trace(a, x0.copy(), c, 1e-3, 16)  # compile
        t_active, ref = timeit(_kernels.rk4_lti_trace, a, x0.copy(), c, 1e-3, n_steps)
        t_numpy, alt = timeit(_rk4_lti_impl, a, x0.copy(), c, 1e-3, n_steps)
        assert np.allclose(ref, alt, rtol=1e-10, atol=1e-12)
        print(f"{model:10s} {full.dim:4d} {t_active * 1e3:13.1f} ms "
              f"{t_numpy * 1e3:7.1f} ms {t_numpy / t_active:7.2f}x")


def bench_gram():
    rng = np.random.default_rng(0)
    print("\nGram-matrix assembly over modal eigenvalue pairs")
    print(f"{'kernel':14s} {'n':>5s} {'active (' + gs.backend_name() + ')':>16s} "
          f"{'numpy':>10s} {'speedup':>8s}")
    for n in (34, 200, 1000):
        lams = np.sort(np.exp(rng.uniform(np.log(0.1), np.log(50.0), n)))
        _kernels.swing_gram(1.5, 0.8, lams[:4])  # compile
        _kernels.turbine_gram(1.5, 0.8, 1.1, 0.5, lams[:4])
        t_active, ref = timeit(_kernels.swing_gram, 1.5, 0.8, lams)
        t_numpy, alt = timeit(_swing_gram_numpy, 1.5, 0.8, lams)
        assert np.allclose(ref, alt, rtol=1e-12)
        print(f"{'swing':14s} {n:5d} {t_active * 1e3:13.2f} ms "
              f"{t_numpy * 1e3:7.2f} ms {t_numpy / t_active:7.2f}x")
        t_active, ref = timeit(_kernels.turbine_gram, 1.5, 0.8, 1.1, 0.5, lams)
        t_numpy, alt = timeit(_turbine_gram_numpy, 1.5, 0.8, 1.1, 0.5, lams)
        assert np.allclose(ref, alt, rtol=1e-11)
        print(f"{'turbine':14s} {n:5d} {t_active * 1e3:13.2f} ms "
              f"{t_numpy * 1e3:7.2f} ms {t_numpy / t_active:7.2f}x")


if __name__ == "__main__":
    print(f"active kernel backend: {gs.backend_name()}\n")
    bench_rk4()
    bench_gram()
