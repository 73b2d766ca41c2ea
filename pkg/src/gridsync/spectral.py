"""Eigenstructure of the scaled Laplacian and disturbance projections.

The scaled Laplacian F^{-1/2} L F^{-1/2} of a connected grid is symmetric
positive semidefinite with a one-dimensional kernel spanned by F^{1/2} 1.
Its orthonormal eigenbasis splits into the kernel direction ``v0`` and the
remaining columns ``v_perp``; every synchronization metric downstream is a
quadratic form in quantities projected through ``v_perp``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SpectralError(ValueError):
    pass


@dataclass(frozen=True)
class ModalBasis:
    """Eigendecomposition of the scaled Laplacian.

    ``lambdas`` is ascending with ``lambdas[0]`` snapped to exactly zero.
    ``vectors`` is the full orthonormal eigenvector matrix, ``v0`` its first
    column (the analytic kernel vector), ``v_perp`` the remaining columns.
    ``gamma`` is the projected inverse-rating matrix v_perp^T F^{-1} v_perp.
    """

    lambdas: np.ndarray
    vectors: np.ndarray
    v0: np.ndarray
    v_perp: np.ndarray
    alpha_f: float
    gamma: np.ndarray
    f: np.ndarray

    @property
    def n(self) -> int:
        return self.lambdas.shape[0]

    def debug_summary(self) -> dict:
        """JSON-friendly diagnostic view: eigenvalues and residual norms."""
        return {
            "n": self.n,
            "lambdas": [float(v) for v in self.lambdas],
            "orthogonality_residual": float(
                np.abs(self.vectors.T @ self.vectors - np.eye(self.n)).max()),
            "kernel_residual": float(
                np.abs(np.sqrt(self.f) @ self.v_perp).max()),
            "alpha_f": self.alpha_f,
        }


def _canonical_sign(col: np.ndarray) -> np.ndarray:
    # first entry whose magnitude is resolvable fixes the sign
    tol = 1e-12 * np.abs(col).max()
    for v in col:
        if abs(v) > tol:
            return col if v > 0 else -col
    return col


def modal_decompose(l_f: np.ndarray, f: np.ndarray) -> ModalBasis:
    """Diagonalize the scaled Laplacian and canonicalize the basis.

    The zero eigenvalue is snapped to exactly 0 and its eigenvector replaced
    by the analytic kernel direction alpha_f * F^{1/2} 1. Remaining columns
    get a deterministic sign (first resolvable entry positive). Raises if a
    second eigenvalue is numerically zero (graph effectively disconnected)
    or if the reconstruction residual is out of tolerance.
    """
    l_f = np.asarray(l_f, dtype=float)
    f = np.asarray(f, dtype=float)
    n = l_f.shape[0]
    if l_f.shape != (n, n) or f.shape != (n,):
        raise SpectralError(f"shape mismatch: L_F {l_f.shape}, f {f.shape}")
    lam, vec = np.linalg.eigh(l_f)
    scale = float(lam[-1])
    if scale <= 0:
        raise SpectralError("scaled Laplacian has no positive eigenvalue")
    if lam[1] < 1e-8 * scale:
        raise SpectralError(
            f"graph effectively disconnected: lambda_1={lam[1]:.3e} vs lambda_max={scale:.3e}"
        )
    if abs(lam[0]) > 1e-9 * scale:
        raise SpectralError(f"kernel eigenvalue not small: lambda_0={lam[0]:.3e}")

    lam = lam.copy()
    lam[0] = 0.0
    alpha_f = float(1.0 / np.sqrt(f.sum()))
    v0 = alpha_f * np.sqrt(f)
    vec = vec.copy()
    # eigh's kernel column equals +-v0 up to roundoff; install the analytic one
    vec[:, 0] = v0
    for k in range(1, n):
        vec[:, k] = _canonical_sign(vec[:, k])
    v_perp = vec[:, 1:]

    recon = (vec * lam) @ vec.T
    if np.linalg.norm(recon - l_f) > 1e-10 * np.linalg.norm(l_f):
        raise SpectralError("eigendecomposition reconstruction residual out of tolerance")

    gamma = v_perp.T @ (v_perp / f[:, None])
    gamma = 0.5 * (gamma + gamma.T)
    return ModalBasis(lambdas=lam, vectors=vec, v0=v0, v_perp=v_perp,
                      alpha_f=alpha_f, gamma=gamma, f=f)


def gamma_matrix(basis: ModalBasis) -> np.ndarray:
    """Projected inverse-rating matrix (symmetric positive definite)."""
    return basis.gamma


def project_disturbance(basis: ModalBasis, u0: np.ndarray) -> np.ndarray:
    """Modal disturbance coordinates z0 = v_perp^T F^{-1/2} u0."""
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (basis.n,):
        raise SpectralError(f"disturbance dimension {u0.shape} != ({basis.n},)")
    return basis.v_perp.T @ (u0 / np.sqrt(basis.f))


_PRESET_NAMES = {"I": "I", "identity": "I", "F": "F", "F2": "F2", "F^2": "F2"}


def sigma_z(basis: ModalBasis, sigma_u) -> np.ndarray:
    """Modal covariance v_perp^T F^{-1/2} Sigma_u F^{-1/2} v_perp.

    ``sigma_u`` is a preset name ("I", "F", "F2") or an explicit diagonal
    (1-D vector of per-bus variances). Non-diagonal covariances are rejected:
    bus disturbances are modeled as independent.
    """
    f = basis.f
    if isinstance(sigma_u, str):
        try:
            preset = _PRESET_NAMES[sigma_u]
        except KeyError:
            raise SpectralError(f"unknown covariance preset '{sigma_u}'") from None
        diag = {"I": np.ones_like(f), "F": f, "F2": f * f}[preset]
    else:
        arr = np.asarray(sigma_u, dtype=float)
        if arr.ndim == 2:
            if not np.array_equal(arr, np.diag(np.diag(arr))):
                raise SpectralError("explicit disturbance covariance must be diagonal")
            arr = np.diag(arr)
        if arr.shape != f.shape:
            raise SpectralError(f"covariance diagonal shape {arr.shape} != {f.shape}")
        diag = arr
    scaled = basis.v_perp * (diag / f)[:, None]
    out = basis.v_perp.T @ scaled
    return 0.5 * (out + out.T)
