"""Pure-numpy implementations of the solver's hot kernels.

Mirrors the compiled module in mta._kernels; either one is picked at import
time by mta.backend. Keep the two in lockstep: the parity test suite holds
them to 1e-12 of each other.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

VANISHING_DENOM = 1e-300


def gaussian_weights(views: np.ndarray, mode: np.ndarray, inv_h_sq: np.ndarray) -> np.ndarray:
    """k_p = exp(-||f_p - mode||^2 * inv_h_sq_p)."""
    diff = views - mode
    sq = np.einsum("ij,ij->i", diff, diff)
    return np.exp(-sq * inv_h_sq)


def y_step(kern: np.ndarray, w: np.ndarray, y_prev: np.ndarray, lam: float, lam_y: float):
    """One inlierness update: softmax of (k + lam * W y) / lam_y.

    Returns (y_new, ok). ok is False only if the stabilized softmax still
    degenerates (defensive; cannot happen after max-subtraction on finite
    input), in which case y_new is uniform.
    """
    e = (kern + lam * (w @ y_prev)) / lam_y
    e -= e.max()
    np.exp(e, out=e)
    total = e.sum()
    if not np.isfinite(total) or total <= 0.0:
        n = kern.shape[0]
        return np.full(n, 1.0 / n), False
    e /= total
    return e, True


def m_step(views: np.ndarray, y: np.ndarray, mode: np.ndarray, inv_h_sq: np.ndarray):
    """One fixed-point mode update.

    Weights each view by y_p * k_p * inv_h_sq_p, the stationary weighting of
    the objective's density term under per-point bandwidths (for equal
    bandwidths this is the classic y_p * k_p map, rescaled).

    Returns (m_next, u, denom) where u = sum_p y_p k_p is the density value
    tracked by the convergence monitor. If denom underflows the mode is
    returned unchanged.
    """
    k = gaussian_weights(views, mode, inv_h_sq)
    u = float(y @ k)
    wgt = y * k * inv_h_sq
    denom = float(wgt.sum())
    if denom < VANISHING_DENOM:
        return mode.copy(), u, denom
    return (wgt @ views) / denom, u, denom
