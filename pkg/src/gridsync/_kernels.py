"""Hot numeric kernels.

Two loop-heavy computations dominate runtime at scale and are therefore
built through :mod:`gridsync._accel` (numba ``@njit`` when available, plain
numpy otherwise):

* ``rk4_lti_trace`` - classical fixed-step 4th-order Runge-Kutta for the
  constant-input linear system ``x' = a x + c``, storing the full trace.
* ``swing_gram`` / ``turbine_gram`` - assembly of the matrix of pairwise
  impulse-response inner products over all modal eigenvalue pairs.

The scalar closed forms for the inner products live here as well so that the
loop builds and the public API evaluate one single transcription.
"""

from __future__ import annotations

import numpy as np

from ._accel import NUMBA_ENABLED, jit_if_enabled


# ---------------------------------------------------------------------------
# scalar closed forms
# ---------------------------------------------------------------------------

def _swing_inner_scalar(m: float, d: float, lk: float, ll: float) -> float:
    """Inner product of two second-order modal step-kernels 1/(ms^2+ds+lam)."""
    return 2.0 * d / (m * (lk - ll) ** 2 + 2.0 * (lk + ll) * d * d)


def _turbine_norm_scalar(m: float, d: float, r: float, t: float, lam: float) -> float:
    """Squared L2 norm of the third-order modal step-kernel at eigenvalue lam.

    ``r`` is the inverse droop gain, ``t`` the turbine time constant.
    """
    num = m + t * (lam * t + d)
    den = 2.0 * lam * (m * (r + d) + t * d * (r + lam * t + d))
    return num / den


def _turbine_inner_scalar(m: float, d: float, r: float, t: float,
                          lk: float, ll: float) -> float:
    """Cross inner product of two third-order modal step-kernels.

    Explicit 15-term numerator / 54-term denominator polynomial in
    (m, d, r, t, lk, ll); evaluated term by term, no refactoring, so the
    transcription can be audited against its sources one monomial at a time.
    """
    num = 2.0 * (
        2.0 * d * m**2
        + 2.0 * m**2 * r
        + 2.0 * d**3 * t**2
        + 4.0 * d**2 * m * t
        + 2.0 * d**2 * lk * t**3
        + 2.0 * d**2 * ll * t**3
        + 2.0 * d**2 * r * t**2
        + 4.0 * d * m * r * t
        + 2.0 * d * lk * ll * t**4
        + 2.0 * d * lk * m * t**2
        + 2.0 * d * ll * m * t**2
        + d * lk * r * t**3
        + d * ll * r * t**3
        + lk * m * r * t**2
        + ll * m * r * t**2
    )
    den = (
        4.0 * d**4 * lk * t**2
        + 4.0 * d**4 * ll * t**2
        + 4.0 * d**3 * lk**2 * t**3
        + 8.0 * d**3 * lk * ll * t**3
        + 8.0 * d**3 * lk * m * t
        + 8.0 * d**3 * lk * r * t**2
        + 4.0 * d**3 * ll**2 * t**3
        + 8.0 * d**3 * ll * m * t
        + 8.0 * d**3 * ll * r * t**2
        + 4.0 * d**2 * lk**2 * ll * t**4
        + 6.0 * d**2 * lk**2 * m * t**2
        + 2.0 * d**2 * lk**2 * r * t**3
        + 4.0 * d**2 * lk * ll**2 * t**4
        + 4.0 * d**2 * lk * ll * m * t**2
        + 12.0 * d**2 * lk * ll * r * t**3
        + 4.0 * d**2 * lk * m**2
        + 16.0 * d**2 * lk * m * r * t
        + 4.0 * d**2 * lk * r**2 * t**2
        + 6.0 * d**2 * ll**2 * m * t**2
        + 2.0 * d**2 * ll**2 * r * t**3
        + 4.0 * d**2 * ll * m**2
        + 16.0 * d**2 * ll * m * r * t
        + 4.0 * d**2 * ll * r**2 * t**2
        + 2.0 * d * lk**3 * m * t**3
        - 2.0 * d * lk**2 * ll * m * t**3
        + 4.0 * d * lk**2 * m**2 * t
        - 2.0 * d * lk * ll**2 * m * t**3
        - 8.0 * d * lk * ll * m**2 * t
        + 16.0 * d * lk * ll * m * r * t**2
        + 8.0 * d * lk * m**2 * r
        + 8.0 * d * lk * m * r**2 * t
        + 2.0 * d * ll**3 * m * t**3
        + 4.0 * d * ll**2 * m**2 * t
        + 8.0 * d * ll * m**2 * r
        + 8.0 * d * ll * m * r**2 * t
        + 2.0 * lk**3 * ll * m * t**4
        + 2.0 * lk**3 * m**2 * t**2
        + lk**3 * m * r * t**3
        - 4.0 * lk**2 * ll**2 * m * t**4
        - 2.0 * lk**2 * ll * m**2 * t**2
        - lk**2 * ll * m * r * t**3
        + 2.0 * lk**2 * m**3
        - 2.0 * lk**2 * m**2 * r * t
        + 2.0 * lk * ll**3 * m * t**4
        - 2.0 * lk * ll**2 * m**2 * t**2
        - lk * ll**2 * m * r * t**3
        - 4.0 * lk * ll * m**3
        + 4.0 * lk * ll * m**2 * r * t
        + 4.0 * lk * m**2 * r**2
        + 2.0 * ll**3 * m**2 * t**2
        + ll**3 * m * r * t**3
        + 2.0 * ll**2 * m**3
        - 2.0 * ll**2 * m**2 * r * t
        + 4.0 * ll * m**2 * r**2
    )
    return num / den


swing_inner = jit_if_enabled(_swing_inner_scalar)
turbine_norm = jit_if_enabled(_turbine_norm_scalar)
turbine_inner = jit_if_enabled(_turbine_inner_scalar)


# ---------------------------------------------------------------------------
# RK4 trace
# ---------------------------------------------------------------------------

def _rk4_lti_impl(a, x0, c, dt, n_steps):
    """Integrate x' = a x + c with classical RK4 on a uniform grid.

    Returns the (n_steps + 1, dim) state trace including the initial state.
    """
    dim = a.shape[0]
    out = np.empty((n_steps + 1, dim))
    x = x0.copy()
    out[0] = x
    sixth = dt / 6.0
    half = 0.5 * dt
    for i in range(n_steps):
        k1 = a @ x + c
        k2 = a @ (x + half * k1) + c
        k3 = a @ (x + half * k2) + c
        k4 = a @ (x + dt * k3) + c
        x = x + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = x
    return out


rk4_lti_trace = jit_if_enabled(_rk4_lti_impl)


# ---------------------------------------------------------------------------
# Gram-matrix assembly
# ---------------------------------------------------------------------------

def _swing_gram_numpy(m, d, lams):
    lk = lams[:, None]
    ll = lams[None, :]
    return 2.0 * d / (m * (lk - ll) ** 2 + 2.0 * (lk + ll) * d * d)


def _swing_gram_loop(m, d, lams):
    n = lams.shape[0]
    g = np.empty((n, n))
    for k in range(n):
        for l in range(k, n):
            v = swing_inner(m, d, lams[k], lams[l])
            g[k, l] = v
            g[l, k] = v
    return g


def _turbine_gram_numpy(m, d, r, t, lams):
    lk = lams[:, None]
    ll = lams[None, :]
    num = 2.0 * (
        2.0 * d * m**2 + 2.0 * m**2 * r + 2.0 * d**3 * t**2 + 4.0 * d**2 * m * t
        + 2.0 * d**2 * lk * t**3 + 2.0 * d**2 * ll * t**3 + 2.0 * d**2 * r * t**2
        + 4.0 * d * m * r * t + 2.0 * d * lk * ll * t**4 + 2.0 * d * lk * m * t**2
        + 2.0 * d * ll * m * t**2 + d * lk * r * t**3 + d * ll * r * t**3
        + lk * m * r * t**2 + ll * m * r * t**2
    )
    den = (
        4.0 * d**4 * lk * t**2 + 4.0 * d**4 * ll * t**2 + 4.0 * d**3 * lk**2 * t**3
        + 8.0 * d**3 * lk * ll * t**3 + 8.0 * d**3 * lk * m * t
        + 8.0 * d**3 * lk * r * t**2 + 4.0 * d**3 * ll**2 * t**3
        + 8.0 * d**3 * ll * m * t + 8.0 * d**3 * ll * r * t**2
        + 4.0 * d**2 * lk**2 * ll * t**4 + 6.0 * d**2 * lk**2 * m * t**2
        + 2.0 * d**2 * lk**2 * r * t**3 + 4.0 * d**2 * lk * ll**2 * t**4
        + 4.0 * d**2 * lk * ll * m * t**2 + 12.0 * d**2 * lk * ll * r * t**3
        + 4.0 * d**2 * lk * m**2 + 16.0 * d**2 * lk * m * r * t
        + 4.0 * d**2 * lk * r**2 * t**2 + 6.0 * d**2 * ll**2 * m * t**2
        + 2.0 * d**2 * ll**2 * r * t**3 + 4.0 * d**2 * ll * m**2
        + 16.0 * d**2 * ll * m * r * t + 4.0 * d**2 * ll * r**2 * t**2
        + 2.0 * d * lk**3 * m * t**3 - 2.0 * d * lk**2 * ll * m * t**3
        + 4.0 * d * lk**2 * m**2 * t - 2.0 * d * lk * ll**2 * m * t**3
        - 8.0 * d * lk * ll * m**2 * t + 16.0 * d * lk * ll * m * r * t**2
        + 8.0 * d * lk * m**2 * r + 8.0 * d * lk * m * r**2 * t
        + 2.0 * d * ll**3 * m * t**3 + 4.0 * d * ll**2 * m**2 * t
        + 8.0 * d * ll * m**2 * r + 8.0 * d * ll * m * r**2 * t
        + 2.0 * lk**3 * ll * m * t**4 + 2.0 * lk**3 * m**2 * t**2
        + lk**3 * m * r * t**3 - 4.0 * lk**2 * ll**2 * m * t**4
        - 2.0 * lk**2 * ll * m**2 * t**2 - lk**2 * ll * m * r * t**3
        + 2.0 * lk**2 * m**3 - 2.0 * lk**2 * m**2 * r * t
        + 2.0 * lk * ll**3 * m * t**4 - 2.0 * lk * ll**2 * m**2 * t**2
        - lk * ll**2 * m * r * t**3 - 4.0 * lk * ll * m**3
        + 4.0 * lk * ll * m**2 * r * t + 4.0 * lk * m**2 * r**2
        + 2.0 * ll**3 * m**2 * t**2 + ll**3 * m * r * t**3 + 2.0 * ll**2 * m**3
        - 2.0 * ll**2 * m**2 * r * t + 4.0 * ll * m**2 * r**2
    )
    g = num / den
    n = lams.shape[0]
    for k in range(n):
        g[k, k] = _turbine_norm_scalar(m, d, r, t, lams[k])
    # mirror the upper triangle: same bitwise-symmetric contract as the loop build
    lower = np.tril_indices(n, -1)
    g[lower] = g.T[lower]
    return g


def _turbine_gram_loop(m, d, r, t, lams):
    n = lams.shape[0]
    g = np.empty((n, n))
    for k in range(n):
        g[k, k] = turbine_norm(m, d, r, t, lams[k])
        for l in range(k + 1, n):
            v = turbine_inner(m, d, r, t, lams[k], lams[l])
            g[k, l] = v
            g[l, k] = v
    return g


if NUMBA_ENABLED:
    swing_gram = jit_if_enabled(_swing_gram_loop)
    turbine_gram = jit_if_enabled(_turbine_gram_loop)
else:
    swing_gram = _swing_gram_numpy
    turbine_gram = _turbine_gram_numpy
