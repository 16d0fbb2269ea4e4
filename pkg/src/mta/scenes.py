"""Deterministic synthetic scenes and the Monte-Carlo benchmark harness.

A scene plants K unit-norm class prototypes, draws most views around the
true class prototype and a fraction of outlier views elsewhere, and builds
noisy text embeddings from the prototypes. Reproducibility contract: all
randomness flows through a Philox generator keyed by SeedSequence
(entropy=seed, spawn_key=(stream,)), so identical (config, trial) pairs
yield bit-identical scenes on every platform.

wrong_class outliers model degenerate augmentations that collapse onto a
confusable concept: they cluster, at half the inlier spread, around one
other class prototype. That coherence is what stresses prediction-affinity
weighting; isolated uniform-sphere outliers are largely neutralized by the
variable bandwidths alone.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .embeddings import ClassEmbeddings, EmbeddingSet, l2_normalize
from .predictors import run_method
from .solver import Hyperparams

OUTLIER_MODES = ("uniform_sphere", "wrong_class")

SCENE_TEMPERATURE = 30.0  # logit scale used for all synthetic class sets
WRONG_CLASS_SPREAD = 0.4  # outlier noise as a fraction of inlier_noise


@dataclass(frozen=True)
class SceneConfig:
    seed: int = 0
    dim: int = 64
    n_classes: int = 10
    n_views: int = 64
    inlier_noise: float = 0.35
    outlier_fraction: float = 0.3
    outlier_mode: str = "wrong_class"
    text_noise: float = 0.1

    def __post_init__(self):
        if self.dim < 2 or self.n_classes < 2 or self.n_views < 1:
            raise ValueError("need dim >= 2, n_classes >= 2, n_views >= 1")
        if not 0.0 <= self.outlier_fraction < 1.0:
            raise ValueError("outlier_fraction must lie in [0, 1)")
        if self.outlier_mode not in OUTLIER_MODES:
            raise ValueError(f"outlier_mode must be one of {OUTLIER_MODES}")
        if self.inlier_noise < 0 or self.text_noise < 0:
            raise ValueError("noise scales must be >= 0")


@dataclass(frozen=True)
class Scene:
    views: EmbeddingSet
    classes: ClassEmbeddings
    true_label: int
    inlier_mask: np.ndarray  # True where the view was drawn around the true prototype


def substream(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for one named substream of the master seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def generate_scene(config: SceneConfig, trial: int = 0) -> Scene:
    """Build one scene; view 0 is always an inlier (the 'original' image)."""
    rng = substream(config.seed, trial)
    d, k, n = config.dim, config.n_classes, config.n_views

    prototypes = l2_normalize(rng.standard_normal((k, d)))
    true_label = int(rng.integers(k))
    wrong_label = int((true_label + 1 + rng.integers(k - 1)) % k)

    n_out = int(np.floor(config.outlier_fraction * n))
    n_in = n - n_out

    inliers = l2_normalize(
        prototypes[true_label] + config.inlier_noise * rng.standard_normal((n_in, d))
    )
    if n_out:
        if config.outlier_mode == "uniform_sphere":
            outliers = l2_normalize(rng.standard_normal((n_out, d)))
        else:
            spread = WRONG_CLASS_SPREAD * config.inlier_noise
            outliers = l2_normalize(
                prototypes[wrong_label] + spread * rng.standard_normal((n_out, d))
            )
        rest = np.vstack([inliers[1:], outliers])
        mask_rest = np.concatenate([np.ones(n_in - 1, bool), np.zeros(n_out, bool)])
    else:
        rest = inliers[1:]
        mask_rest = np.ones(n_in - 1, bool)

    perm = rng.permutation(rest.shape[0])
    views = np.vstack([inliers[:1], rest[perm]])
    inlier_mask = np.concatenate([[True], mask_rest[perm]])

    texts = l2_normalize(prototypes + config.text_noise * rng.standard_normal((k, d)))
    return Scene(
        views=EmbeddingSet(views, original_index=0),
        classes=ClassEmbeddings(texts, temperature=SCENE_TEMPERATURE),
        true_label=true_label,
        inlier_mask=inlier_mask,
    )


@dataclass
class MethodStats:
    method: str
    trials: int
    correct: int
    accuracy: float
    ci_low: float
    ci_high: float
    mean_inlier_mass: float | None
    mean_iterations: float
    wall_time_s: float

    def record(self) -> dict:
        # wall time is excluded: records must be byte-identical across runs
        return {
            "method": self.method,
            "trials": self.trials,
            "correct": self.correct,
            "accuracy": round(self.accuracy, 10),
            "ci95": [round(self.ci_low, 10), round(self.ci_high, 10)],
            "mean_inlier_mass": None
            if self.mean_inlier_mass is None
            else round(self.mean_inlier_mass, 10),
            "mean_iterations": round(self.mean_iterations, 10),
        }


@dataclass
class BenchResult:
    config: SceneConfig
    trials: int
    methods: list[str]
    stats: dict[str, MethodStats]

    def records(self) -> list[str]:
        """Deterministic line-delimited records (schema-versioned JSON)."""
        base = {"schema_version": 1, "kind": "bench", "config": asdict(self.config), "trials": self.trials}
        lines = []
        for method in self.methods:
            rec = dict(base)
            rec.update(self.stats[method].record())
            lines.append(json.dumps(rec, sort_keys=True))
        return lines

    def summary(self) -> str:
        header = f"{'method':<12} {'accuracy':>9} {'95% CI':>17} {'inlier mass':>12} {'iters':>7} {'time/trial':>11}"
        rows = [header, "-" * len(header)]
        for method in self.methods:
            s = self.stats[method]
            mass = "-" if s.mean_inlier_mass is None else f"{s.mean_inlier_mass:.3f}"
            rows.append(
                f"{method:<12} {s.accuracy:>9.4f} "
                f"[{s.ci_low:.4f}, {s.ci_high:.4f}] {mass:>12} "
                f"{s.mean_iterations:>7.1f} {s.wall_time_s / max(s.trials, 1):>10.2e}s"
            )
        return "\n".join(rows)


def _binomial_ci(correct: int, trials: int) -> tuple[float, float]:
    """Normal-approximation 95% interval, clipped to [0, 1]."""
    p = correct / trials
    half = 1.96 * np.sqrt(p * (1.0 - p) / trials)
    return max(0.0, p - half), min(1.0, p + half)


def run_benchmark(
    config: SceneConfig,
    methods: list[str],
    trials: int,
    params: Hyperparams | None = None,
) -> BenchResult:
    """Run each method on ``trials`` independently seeded scenes."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    params = params or Hyperparams()

    correct = {m: 0 for m in methods}
    inlier_mass = {m: 0.0 for m in methods}
    has_mass = {m: False for m in methods}
    iters = {m: 0.0 for m in methods}
    elapsed = {m: 0.0 for m in methods}

    for trial in range(trials):
        scene = generate_scene(config, trial)
        for method in methods:
            t0 = time.perf_counter()
            rep = run_method(method, scene.views, scene.classes, params)
            elapsed[method] += time.perf_counter() - t0
            if rep.predicted_class == scene.true_label:
                correct[method] += 1
            if rep.inlierness is not None:
                inlier_mass[method] += float(rep.inlierness[scene.inlier_mask].sum())
                has_mass[method] = True
            iters[method] += sum(rep.iterations.values())

    stats = {}
    for method in methods:
        lo, hi = _binomial_ci(correct[method], trials)
        stats[method] = MethodStats(
            method=method,
            trials=trials,
            correct=correct[method],
            accuracy=correct[method] / trials,
            ci_low=lo,
            ci_high=hi,
            mean_inlier_mass=inlier_mass[method] / trials if has_mass[method] else None,
            mean_iterations=iters[method] / trials,
            wall_time_s=elapsed[method],
        )
    return BenchResult(config=config, trials=trials, methods=list(methods), stats=stats)
