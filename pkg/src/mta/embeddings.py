"""Core vector types: augmented-view embeddings, class text embeddings, and
the text-driven softmax predictions built from them.

All matrices are float64 internally and row-normalized on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonFinite, ZeroVector

NORM_TOL = 1e-5
ZERO_NORM = 1e-12

DEFAULT_TEMPERATURE = 100.0  # standard CLIP logit scale, overridable everywhere


def as_matrix(x) -> np.ndarray:
    """Return the underlying (n, d) float64 matrix of an EmbeddingSet or array."""
    views = getattr(x, "views", x)
    return np.asarray(views, dtype=np.float64)


def l2_normalize(matrix) -> np.ndarray:
    """Normalize each row to unit L2 norm.

    Raises ZeroVector if any row norm falls below 1e-12; entries must be
    finite.
    """
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
        squeeze = True
    else:
        squeeze = False
    if not np.isfinite(arr).all():
        raise NonFinite("matrix contains NaN or infinite entries")
    norms = np.linalg.norm(arr, axis=1)
    if (norms < ZERO_NORM).any():
        bad = int(np.argmin(norms))
        raise ZeroVector(f"row {bad} has norm {norms[bad]:.3e} < {ZERO_NORM}")
    out = arr / norms[:, None]
    return out[0] if squeeze else out


def _check_unit_rows(arr: np.ndarray, what: str) -> None:
    norms = np.linalg.norm(arr, axis=1)
    if not np.allclose(norms, 1.0, atol=NORM_TOL):
        raise ValueError(f"{what} rows are not unit-norm within {NORM_TOL}")


@dataclass(frozen=True)
class EmbeddingSet:
    """The N augmented-view feature vectors of one test sample.

    Row ``original_index`` holds the embedding of the non-augmented image.
    Rows are unit-norm; the matrix is immutable after construction.
    """

    views: np.ndarray
    original_index: int = 0

    def __post_init__(self):
        arr = l2_normalize(self.views)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("views must be a non-empty 2-D matrix")
        if not 0 <= self.original_index < arr.shape[0]:
            raise ValueError("original_index out of range")
        arr.setflags(write=False)
        object.__setattr__(self, "views", arr)

    @property
    def n_views(self) -> int:
        return self.views.shape[0]

    @property
    def dim(self) -> int:
        return self.views.shape[1]

    @property
    def original(self) -> np.ndarray:
        return self.views[self.original_index]


@dataclass(frozen=True)
class ClassEmbeddings:
    """The K class text embeddings plus the model's logit temperature."""

    classes: np.ndarray
    temperature: float = DEFAULT_TEMPERATURE
    class_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        arr = l2_normalize(self.classes)
        if arr.ndim != 2 or arr.shape[0] < 2:
            raise ValueError("need at least 2 classes")
        if not (np.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError("temperature must be finite and positive")
        names = self.class_names or tuple(f"class_{k}" for k in range(arr.shape[0]))
        if len(names) != arr.shape[0]:
            raise ValueError("class_names length does not match class count")
        arr.setflags(write=False)
        object.__setattr__(self, "classes", arr)
        object.__setattr__(self, "class_names", tuple(names))

    @property
    def n_classes(self) -> int:
        return self.classes.shape[0]

    @property
    def dim(self) -> int:
        return self.classes.shape[1]


@dataclass(frozen=True)
class PredictionMatrix:
    """Per-view softmax scores over the classes; rows sum to one."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("probs must be 2-D")
        if not np.isfinite(arr).all():
            raise NonFinite("probs contain NaN or infinite entries")
        if (arr < 0).any() or (arr > 1).any():
            raise ValueError("probs must lie in [0, 1]")
        if not np.allclose(arr.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("each probs row must sum to 1")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def n_views(self) -> int:
        return self.probs.shape[0]

    @property
    def n_classes(self) -> int:
        return self.probs.shape[1]


def stable_softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction; safe for logits up to ~1e300."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    np.exp(z, out=z)
    z /= z.sum(axis=-1, keepdims=True)
    return z


def softmax_predictions(views: EmbeddingSet, classes: ClassEmbeddings) -> PredictionMatrix:
    """Temperature-scaled softmax of view/class cosine logits."""
    if views.dim != classes.dim:
        raise DimensionMismatch(
            f"views have dim {views.dim} but classes have dim {classes.dim}"
        )
    logits = classes.temperature * (views.views @ classes.classes.T)
    return PredictionMatrix(stable_softmax(logits))
