"""Per-point variable bandwidth estimation and Gaussian kernel evaluation.

Each point gets its own squared bandwidth from the mean squared distance to
a fixed ratio of its nearest neighbors:

    h_p^2 = (1 / (rho * (N - 1))) * sum_{q in I_p} ||f_p - f_q||^2

where I_p holds the max(1, round(rho * (N - 1))) nearest neighbors of p
(self excluded, distance ties broken by lower index). Bandwidths are fixed
once per sample; they are not re-estimated during iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .embeddings import as_matrix

BANDWIDTH_FLOOR = 1e-12  # guards division by zero on duplicate-view inputs


@dataclass(frozen=True)
class BandwidthVector:
    """Squared bandwidths h_p^2, all clamped to at least ``floor``."""

    h_sq: np.ndarray
    rho: float
    floor: float = BANDWIDTH_FLOOR

    def __post_init__(self):
        arr = np.asarray(self.h_sq, dtype=np.float64)
        if (arr < self.floor).any():
            raise ValueError("squared bandwidths must be >= floor")
        arr.setflags(write=False)
        object.__setattr__(self, "h_sq", arr)

    @property
    def inv_h_sq(self) -> np.ndarray:
        return 1.0 / self.h_sq


def neighbor_count(n_views: int, rho: float) -> int:
    """Size of each neighbor set: max(1, round(rho * (N - 1))), ties-to-even."""
    return max(1, int(round(rho * (n_views - 1))))


def variable_bandwidth(views, rho: float = 0.3) -> BandwidthVector:
    """Estimate per-point squared bandwidths from nearest-neighbor distances."""
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    f = as_matrix(views)
    n = f.shape[0]
    if n == 1:
        return BandwidthVector(np.full(1, BANDWIDTH_FLOOR), rho)

    sq_norms = np.einsum("ij,ij->i", f, f)
    d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (f @ f.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, np.inf)  # exclude self from the neighbor sets

    count = neighbor_count(n, rho)
    # stable sort keeps ties ordered by lower index
    order = np.argsort(d2, axis=1, kind="stable")[:, :count]
    nearest = np.take_along_axis(d2, order, axis=1)
    h_sq = nearest.sum(axis=1) / (rho * (n - 1))
    np.maximum(h_sq, BANDWIDTH_FLOOR, out=h_sq)
    return BandwidthVector(h_sq, rho)


def gaussian_kernel(views, mode: np.ndarray, h_sq: BandwidthVector) -> np.ndarray:
    """k_p = exp(-||f_p - mode||^2 / h_p^2), unnormalized, in (0, 1]."""
    f = as_matrix(views)
    m = np.asarray(mode, dtype=np.float64)
    if f.shape[1] != m.shape[0]:
        raise ValueError("mode dimension does not match views")
    return backend.gaussian_weights(f, m, h_sq.inv_h_sq)
