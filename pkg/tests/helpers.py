"""Shared instance generators for the test suite."""

from __future__ import annotations

import numpy as np

import mta.scenes
from mta import ClassEmbeddings, EmbeddingSet, SceneConfig, generate_scene, l2_normalize


def make_instance(
    seed: int,
    n: int = 16,
    d: int = 8,
    k: int = 4,
    inlier_noise: float = 0.3,
    outlier_fraction: float = 0.2,
    outlier_mode: str = "uniform_sphere",
    temperature: float = 30.0,
):
    """One synthetic scene for solver-level tests, at a chosen logit scale."""
    old = mta.scenes.SCENE_TEMPERATURE
    mta.scenes.SCENE_TEMPERATURE = temperature
    try:
        return generate_scene(
            SceneConfig(
                seed=seed,
                dim=d,
                n_classes=k,
                n_views=n,
                inlier_noise=inlier_noise,
                outlier_fraction=outlier_fraction,
                outlier_mode=outlier_mode,
                text_noise=0.1,
            )
        )
    finally:
        mta.scenes.SCENE_TEMPERATURE = old


def random_unit_rows(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    return l2_normalize(rng.standard_normal((n, d)))


def make_views(rng: np.random.Generator, n: int, d: int) -> EmbeddingSet:
    return EmbeddingSet(random_unit_rows(rng, n, d))


def make_classes(rng: np.random.Generator, k: int, d: int, temperature: float = 30.0) -> ClassEmbeddings:
    return ClassEmbeddings(random_unit_rows(rng, k, d), temperature=temperature)
