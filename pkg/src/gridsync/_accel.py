"""Kernel backend selection.

The hot numeric loops (fixed-step RK4 integration, Gram-matrix assembly for
the modal inner products) ship in two builds: a numba ``@njit`` version and a
pure-numpy version. The numba build is used whenever numba imports cleanly;
set ``GRIDSYNC_NO_NUMBA=1`` in the environment to force the numpy fallback.

``benchmarks/bench_kernels.py`` times the two builds against each other.
"""

from __future__ import annotations

import os


def _fallback_forced() -> bool:
    return os.environ.get("GRIDSYNC_NO_NUMBA", "0").lower() in ("1", "true", "yes")


try:
    import numba as _numba  # noqa: F401

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

NUMBA_ENABLED: bool = _HAVE_NUMBA and not _fallback_forced()


def backend_name() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return "numba" if NUMBA_ENABLED else "numpy"


def jit_if_enabled(func):
    """Compile ``func`` with numba when the numba backend is active.

    With the numpy backend the function is returned untouched, so both builds
    share one source of truth for the loop bodies.
    """
    if not NUMBA_ENABLED:
        return func
    from numba import njit

    return njit(cache=True, nogil=True)(func)
