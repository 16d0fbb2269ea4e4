"""Pairwise affinity matrix coupling the inlierness scores.

Text affinity is the inner product of per-view softmax prediction vectors;
the vision variant uses the raw feature inner products instead. The diagonal
is zeroed by default; keeping it yields a Gram matrix, the positive
semi-definite case under which the CCCP descent guarantee holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSet, PredictionMatrix

DIAGONAL_MODES = ("zeroed", "kept")


@dataclass(frozen=True)
class AffinityMatrix:
    w: np.ndarray
    diagonal_mode: str = "zeroed"

    def __post_init__(self):
        arr = np.asarray(self.w, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("affinity matrix must be square")
        if self.diagonal_mode not in DIAGONAL_MODES:
            raise ValueError(f"diagonal_mode must be one of {DIAGONAL_MODES}")
        if not np.array_equal(arr, arr.T):
            raise ValueError("affinity matrix must be exactly symmetric")
        arr.setflags(write=False)
        object.__setattr__(self, "w", arr)

    @property
    def n(self) -> int:
        return self.w.shape[0]


def _gram(rows: np.ndarray, diagonal_mode: str) -> AffinityMatrix:
    w = rows @ rows.T
    w = (w + w.T) * 0.5  # force exact symmetry against BLAS blocking
    if diagonal_mode == "zeroed":
        np.fill_diagonal(w, 0.0)
    return AffinityMatrix(w, diagonal_mode)


def text_affinity(preds: PredictionMatrix, diagonal_mode: str = "zeroed") -> AffinityMatrix:
    """w[p, q] = s_p . s_q over softmax prediction rows."""
    return _gram(preds.probs, diagonal_mode)


def vision_affinity(views: EmbeddingSet, diagonal_mode: str = "zeroed") -> AffinityMatrix:
    """w[p, q] = f_p . f_q over the raw (unit-norm) view features."""
    return _gram(views.views, diagonal_mode)
