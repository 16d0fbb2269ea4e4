"""Robust multi-modal MeanShift over augmented-view embeddings.

Jointly optimizes a kernel-density mode and per-view inlierness scores over
a set of augmented-view embeddings, then predicts the class whose text
embedding is most cosine-similar to the mode. Ships the ablation baselines,
a synthetic benchmark harness, brute-force verification oracles, a bundle
interchange format, and a CLI.
"""

from .affinity import AffinityMatrix, text_affinity, vision_affinity
from .backend import NAME as BACKEND_NAME
from .bandwidth import BandwidthVector, gaussian_kernel, variable_bandwidth
from .bundle import read_bundle, write_bundle
from .embeddings import (
    ClassEmbeddings,
    EmbeddingSet,
    PredictionMatrix,
    l2_normalize,
    softmax_predictions,
)
from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    FormatError,
    InconsistentClasses,
    MTAError,
    NonFinite,
    SizeMismatch,
    ZeroVector,
)
from .oracles import grid_oracle, stationarity_oracle
from .predictors import (
    PredictionReport,
    baseline_confidence_threshold,
    baseline_mean,
    baseline_uniform_meanshift,
    baseline_zeroshot,
    ensemble_vote,
    mta_predict,
    predict_from_mode,
    run_method,
)
from .scenes import BenchResult, Scene, SceneConfig, generate_scene, run_benchmark
from .solver import (
    ConvergenceTrace,
    Hyperparams,
    SolveResult,
    classic_meanshift,
    cccp_y_update,
    entropy,
    fixed_point_m_update,
    mta_solve,
    objective,
    solve_m,
    solve_y,
)

__version__ = "0.1.0"

__all__ = [
    "AffinityMatrix",
    "BACKEND_NAME",
    "BandwidthVector",
    "BenchResult",
    "ClassEmbeddings",
    "ConvergenceTrace",
    "DimensionMismatch",
    "DimensionTooLarge",
    "EmbeddingSet",
    "FormatError",
    "Hyperparams",
    "InconsistentClasses",
    "MTAError",
    "NonFinite",
    "PredictionMatrix",
    "PredictionReport",
    "Scene",
    "SceneConfig",
    "SizeMismatch",
    "SolveResult",
    "ZeroVector",
    "baseline_confidence_threshold",
    "baseline_mean",
    "baseline_uniform_meanshift",
    "baseline_zeroshot",
    "cccp_y_update",
    "classic_meanshift",
    "ensemble_vote",
    "entropy",
    "fixed_point_m_update",
    "gaussian_kernel",
    "generate_scene",
    "grid_oracle",
    "l2_normalize",
    "mta_predict",
    "mta_solve",
    "objective",
    "predict_from_mode",
    "read_bundle",
    "run_benchmark",
    "run_method",
    "softmax_predictions",
    "solve_m",
    "solve_y",
    "stationarity_oracle",
    "text_affinity",
    "variable_bandwidth",
    "vision_affinity",
    "write_bundle",
]
