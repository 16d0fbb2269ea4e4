"""Final class prediction from a mode, the ablation baselines, and the
multi-prompt-set majority vote."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .bandwidth import variable_bandwidth
from .embeddings import ClassEmbeddings, EmbeddingSet, l2_normalize, softmax_predictions
from .errors import InconsistentClasses, ZeroVector
from .solver import (
    Hyperparams,
    SolveResult,
    classic_meanshift,
    entropy,
    mta_solve,
)

METHODS = ("mta", "meanshift", "threshold", "mean", "zeroshot")


@dataclass
class PredictionReport:
    """One method's verdict on one sample."""

    predicted_class: int
    class_name: str
    similarities: np.ndarray  # cosine of the (normalized) mode with each t_k
    method: str
    inlierness: np.ndarray | None = None
    iterations: dict[str, int] = field(default_factory=dict)
    objective_trajectory: list[float] | None = None
    flags: tuple[str, ...] = ()
    wall_time_s: float = 0.0


def _report(mode: np.ndarray, classes: ClassEmbeddings, method: str, **extra) -> PredictionReport:
    m = np.asarray(mode, dtype=np.float64)
    norm = np.linalg.norm(m)
    if norm < 1e-12:
        raise ZeroVector(f"mode norm {norm:.3e} is too small for a cosine prediction")
    sims = classes.classes @ (m / norm)
    k_hat = int(np.argmax(sims))  # argmax takes the lowest index on exact ties
    return PredictionReport(
        predicted_class=k_hat,
        class_name=classes.class_names[k_hat],
        similarities=sims,
        method=method,
        **extra,
    )


def predict_from_mode(mode: np.ndarray, classes: ClassEmbeddings, method: str = "mode") -> PredictionReport:
    """Cosine prediction: argmax_k of the normalized mode against each t_k."""
    return _report(mode, classes, method)


def baseline_zeroshot(views: EmbeddingSet, classes: ClassEmbeddings) -> PredictionReport:
    """Plain zero-shot on the original (non-augmented) view."""
    t0 = time.perf_counter()
    rep = _report(views.original, classes, "zeroshot")
    rep.wall_time_s = time.perf_counter() - t0
    return rep


def baseline_mean(views: EmbeddingSet, classes: ClassEmbeddings) -> PredictionReport:
    """Zero-shot on the arithmetic mean of all view embeddings."""
    t0 = time.perf_counter()
    rep = _report(views.views.mean(axis=0), classes, "mean")
    rep.wall_time_s = time.perf_counter() - t0
    return rep


def baseline_uniform_meanshift(
    views: EmbeddingSet, classes: ClassEmbeddings, params: Hyperparams | None = None
) -> PredictionReport:
    """Mode seeking over all views with uniform weights, then predict."""
    params = params or Hyperparams()
    t0 = time.perf_counter()
    h_sq = variable_bandwidth(views, params.rho)
    phase = classic_meanshift(views, views.original, h_sq, params)
    rep = _report(phase.m, classes, "meanshift")
    rep.iterations = {"m": phase.iterations}
    rep.flags = phase.flags
    rep.wall_time_s = time.perf_counter() - t0
    return rep


def baseline_confidence_threshold(
    views: EmbeddingSet,
    classes: ClassEmbeddings,
    fraction: float = 0.1,
    params: Hyperparams | None = None,
) -> PredictionReport:
    """Keep only the most confident views, then run uniform mode seeking.

    Confidence of a view is the negative entropy of its softmax prediction;
    the ceil(fraction * N) most confident views are kept (ties by lower
    index). The mode starts at the original view if it survives the cut,
    otherwise at the most confident kept view.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    params = params or Hyperparams()
    t0 = time.perf_counter()

    probs = softmax_predictions(views, classes).probs
    confidence = np.array([-entropy(row) for row in probs])
    n_keep = int(np.ceil(fraction * views.n_views))
    # stable sort on negated confidence keeps ties ordered by lower index
    kept = np.sort(np.argsort(-confidence, kind="stable")[:n_keep])

    subset = EmbeddingSet(views.views[kept], original_index=0)
    if views.original_index in kept:
        m_init = views.original
    else:
        m_init = views.views[kept[int(np.argmax(confidence[kept]))]]

    h_sq = variable_bandwidth(subset, params.rho)
    phase = classic_meanshift(subset, m_init, h_sq, params)
    rep = _report(phase.m, classes, "threshold")
    rep.iterations = {"m": phase.iterations}
    rep.flags = phase.flags
    rep.wall_time_s = time.perf_counter() - t0
    return rep


def mta_predict(
    views: EmbeddingSet,
    classes: ClassEmbeddings,
    params: Hyperparams | None = None,
    **solve_kw,
) -> PredictionReport:
    """Full robust solve, then cosine prediction from the converged mode."""
    params = params or Hyperparams()
    t0 = time.perf_counter()
    result: SolveResult = mta_solve(views, classes, params, **solve_kw)
    rep = _report(result.mode, classes, "mta")
    rep.inlierness = result.inlierness
    rep.iterations = {
        "outer": result.trace.n_outer,
        "y": result.trace.total_y_iterations,
        "m": result.trace.total_m_iterations,
    }
    rep.objective_trajectory = result.trace.objectives
    rep.flags = result.trace.flags
    rep.wall_time_s = time.perf_counter() - t0
    return rep


def run_method(
    method: str,
    views: EmbeddingSet,
    classes: ClassEmbeddings,
    params: Hyperparams | None = None,
) -> PredictionReport:
    """Dispatch one of the named prediction methods."""
    params = params or Hyperparams()
    if method == "mta":
        return mta_predict(views, classes, params)
    if method == "meanshift":
        return baseline_uniform_meanshift(views, classes, params)
    if method == "threshold":
        return baseline_confidence_threshold(views, classes, params.fraction, params)
    if method == "mean":
        return baseline_mean(views, classes)
    if method == "zeroshot":
        return baseline_zeroshot(views, classes)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def ensemble_vote(reports: list[PredictionReport]) -> PredictionReport:
    """Plurality vote over per-prompt-set predictions.

    Vote ties are broken by the largest sum of the tied classes' cosine
    similarities across all prompt sets, then by the lowest class index.
    """
    if not reports:
        raise ValueError("ensemble_vote needs at least one report")
    n_classes = len(reports[0].similarities)
    for rep in reports:
        if len(rep.similarities) != n_classes:
            raise InconsistentClasses(
                f"reports disagree on class count: {len(rep.similarities)} vs {n_classes}"
            )

    counts = Counter(rep.predicted_class for rep in reports)
    top = max(counts.values())
    tied = sorted(k for k, c in counts.items() if c == top)
    if len(tied) == 1:
        winner = tied[0]
    else:
        sums = np.zeros(len(tied))
        for rep in reports:
            sums += rep.similarities[tied]
        winner = tied[int(np.argmax(sums))]  # argmax ties fall to lowest index

    total_sims = np.sum([rep.similarities for rep in reports], axis=0) / len(reports)
    return PredictionReport(
        predicted_class=winner,
        class_name=_name_for(reports, winner),
        similarities=total_sims,
        method=f"{reports[0].method}+ensemble",
        inlierness=None,
        iterations={"sets": len(reports)},
        flags=tuple(dict.fromkeys(f for rep in reports for f in rep.flags)),
        wall_time_s=sum(rep.wall_time_s for rep in reports),
    )


def _name_for(reports: list[PredictionReport], k: int) -> str:
    for rep in reports:
        if rep.predicted_class == k:
            return rep.class_name
    return f"class_{k}"
