"""Joint mode-seeking / inlierness optimization.

The objective over a mode m and simplex weights y is

    L(m, y) = - sum_p y_p K(f_p - m)
              - (lam / 2) * sum_{p,q} w_{p,q} y_p y_q
              - lam_y * H(y)

with K the per-point Gaussian kernel and H the Shannon entropy. It is
minimized by block coordinate descent: a concave-convex pass over y (each
step a stabilized softmax of (k + lam * W y) / lam_y), then fixed-point
iterations over m. The mode starts at the original view's embedding and y
starts uniform; the y block warm-starts across outer iterations.

A note on the mode update with per-point bandwidths: zeroing the gradient of
the density term gives stationary weights y_p k_p / h_p^2, not the plain
y_p k_p that the equal-bandwidth derivation produces. The two coincide
whenever the h_p are equal. This module uses the stationary weighting, which
keeps the monitored density value u = sum_p y_p k_p non-decreasing along the
m iterations and makes the converged mode an actual stationary point of L.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import backend
from .affinity import DIAGONAL_MODES, AffinityMatrix, text_affinity, vision_affinity
from .bandwidth import BandwidthVector, variable_bandwidth
from .embeddings import ClassEmbeddings, EmbeddingSet, softmax_predictions

AFFINITY_KINDS = ("text", "vision")
FILTERING_MODES = ("inlierness", "uniform", "confidence_threshold")

# non-fatal condition flags carried in traces
FLAG_MAX_INNER_Y = "max_inner_y"
FLAG_MAX_INNER_M = "max_inner_m"
FLAG_MAX_OUTER = "max_outer"
FLAG_DEGENERATE_SIMPLEX = "degenerate_simplex"
FLAG_VANISHING_WEIGHTS = "vanishing_weights"


@dataclass(frozen=True)
class Hyperparams:
    """Solver configuration; defaults follow the method's fixed setting
    (lam=4, lam_y=0.2, rho=0.3)."""

    lam: float = 4.0
    lam_y: float = 0.2
    rho: float = 0.3
    epsilon: float = 1e-6
    max_inner_y: int = 100
    max_inner_m: int = 100
    max_outer: int = 20
    affinity_kind: str = "text"
    diagonal_mode: str = "zeroed"
    filtering: str = "inlierness"
    fraction: float = 0.1

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if not self.lam_y > 0:
            raise ValueError("lam_y must be > 0 (the entropy barrier is required)")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if min(self.max_inner_y, self.max_inner_m, self.max_outer) < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.affinity_kind not in AFFINITY_KINDS:
            raise ValueError(f"affinity_kind must be one of {AFFINITY_KINDS}")
        if self.diagonal_mode not in DIAGONAL_MODES:
            raise ValueError(f"diagonal_mode must be one of {DIAGONAL_MODES}")
        if self.filtering not in FILTERING_MODES:
            raise ValueError(f"filtering must be one of {FILTERING_MODES}")
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError("fraction must lie in (0, 1]")

    def with_(self, **kw) -> "Hyperparams":
        return replace(self, **kw)


def uniform_simplex(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def check_simplex(y: np.ndarray, tol: float = 1e-9) -> bool:
    return (
        y.min() >= 0.0
        and y.max() <= 1.0
        and abs(float(y.sum()) - 1.0) <= tol
    )


def entropy(y: np.ndarray) -> float:
    """Shannon entropy -sum y ln y with 0 ln 0 = 0; lies in [0, ln N]."""
    y = np.asarray(y, dtype=np.float64)
    nz = y[y > 0.0]
    return float(-(nz * np.log(nz)).sum())


def objective_from_kernels(
    kernels: np.ndarray, y: np.ndarray, w: np.ndarray, lam: float, lam_y: float
) -> float:
    """L given precomputed kernel values at the current mode."""
    quad = float(y @ (w @ y))
    return float(-(y @ kernels) - 0.5 * lam * quad - lam_y * entropy(y))


def objective(
    views,
    mode: np.ndarray,
    y: np.ndarray,
    w: AffinityMatrix | np.ndarray,
    h_sq: BandwidthVector,
    params: Hyperparams,
) -> float:
    """Full objective at (mode, y)."""
    from .embeddings import as_matrix

    f = as_matrix(views)
    kernels = backend.gaussian_weights(f, np.asarray(mode, dtype=np.float64), h_sq.inv_h_sq)
    w_arr = w.w if isinstance(w, AffinityMatrix) else np.asarray(w, dtype=np.float64)
    return objective_from_kernels(kernels, np.asarray(y, dtype=np.float64), w_arr, params.lam, params.lam_y)


@dataclass
class YPhase:
    """Result of one inlierness block: final y plus per-step diagnostics."""

    y: np.ndarray
    iterations: int
    step_norms: np.ndarray
    objectives: np.ndarray | None = None
    iterates: list[np.ndarray] | None = None
    flags: tuple[str, ...] = ()


@dataclass
class MPhase:
    """Result of one mode block: final m, density trace u^l, step norms."""

    m: np.ndarray
    iterations: int
    u_trace: np.ndarray
    step_norms: np.ndarray
    trajectory: list[np.ndarray] | None = None
    flags: tuple[str, ...] = ()


@dataclass
class OuterRecord:
    y_iterations: int
    m_iterations: int
    objective: float
    u_trace: np.ndarray
    y_step_norms: np.ndarray
    m_step_norms: np.ndarray
    y_objectives: np.ndarray | None
    delta_y: float
    delta_m: float
    y_iterates: list[np.ndarray] | None = None
    m_trajectory: list[np.ndarray] | None = None


@dataclass
class ConvergenceTrace:
    outer: list[OuterRecord] = field(default_factory=list)
    converged: bool = False
    flags: tuple[str, ...] = ()
    descent_violations: int = 0

    @property
    def clean(self) -> bool:
        """Outer criterion met and no inner phase ever hit its cap."""
        return self.converged and not self.flags

    @property
    def n_outer(self) -> int:
        return len(self.outer)

    @property
    def total_y_iterations(self) -> int:
        return sum(r.y_iterations for r in self.outer)

    @property
    def total_m_iterations(self) -> int:
        return sum(r.m_iterations for r in self.outer)

    @property
    def objectives(self) -> list[float]:
        return [r.objective for r in self.outer]


@dataclass
class SolveResult:
    mode: np.ndarray
    inlierness: np.ndarray
    trace: ConvergenceTrace
    w: AffinityMatrix
    h_sq: BandwidthVector


def cccp_y_update(
    kernels: np.ndarray, w: AffinityMatrix | np.ndarray, y_prev: np.ndarray, params: Hyperparams
) -> np.ndarray:
    """One concave-convex update of y; output lies on the simplex."""
    w_arr = w.w if isinstance(w, AffinityMatrix) else np.asarray(w, dtype=np.float64)
    y_new, _ok = backend.y_step(
        np.asarray(kernels, dtype=np.float64),
        w_arr,
        np.asarray(y_prev, dtype=np.float64),
        params.lam,
        params.lam_y,
    )
    return y_new


def solve_y(
    kernels: np.ndarray,
    w: AffinityMatrix | np.ndarray,
    y_init: np.ndarray,
    params: Hyperparams,
    record_objectives: bool = False,
    record_iterates: bool = False,
) -> YPhase:
    """Iterate the y updates until the step norm drops below epsilon."""
    w_arr = w.w if isinstance(w, AffinityMatrix) else np.asarray(w, dtype=np.float64)
    kernels = np.asarray(kernels, dtype=np.float64)
    y = np.asarray(y_init, dtype=np.float64)

    flags: list[str] = []
    steps: list[float] = []
    objectives: list[float] | None = [] if record_objectives else None
    iterates: list[np.ndarray] | None = [] if record_iterates else None

    if objectives is not None:
        objectives.append(objective_from_kernels(kernels, y, w_arr, params.lam, params.lam_y))

    n_iter = 0
    while True:
        y_new, ok = backend.y_step(kernels, w_arr, y, params.lam, params.lam_y)
        if not ok:
            flags.append(FLAG_DEGENERATE_SIMPLEX)
        n_iter += 1
        step = float(np.linalg.norm(y_new - y))
        steps.append(step)
        if objectives is not None:
            objectives.append(objective_from_kernels(kernels, y_new, w_arr, params.lam, params.lam_y))
        if iterates is not None:
            iterates.append(y_new)
        y = y_new
        if step < params.epsilon:
            break
        if n_iter >= params.max_inner_y:
            flags.append(FLAG_MAX_INNER_Y)
            break

    return YPhase(
        y=y,
        iterations=n_iter,
        step_norms=np.asarray(steps),
        objectives=None if objectives is None else np.asarray(objectives),
        iterates=iterates,
        flags=tuple(dict.fromkeys(flags)),
    )


def fixed_point_m_update(
    views, y: np.ndarray, m_prev: np.ndarray, h_sq: BandwidthVector
) -> np.ndarray:
    """One fixed-point mode update; returns m_prev if the weights vanish."""
    from .embeddings import as_matrix

    m_new, _u, _denom = backend.m_step(
        as_matrix(views),
        np.asarray(y, dtype=np.float64),
        np.asarray(m_prev, dtype=np.float64),
        h_sq.inv_h_sq,
    )
    return m_new


def solve_m(
    views,
    y: np.ndarray,
    m_init: np.ndarray,
    h_sq: BandwidthVector,
    params: Hyperparams,
    record_trajectory: bool = False,
) -> MPhase:
    """Iterate mode updates until the step norm drops below epsilon.

    Records the density value u^l = sum_p y_p K(f_p - m^l) at every iterate
    including the final one; the sequence is non-decreasing up to float
    noise.
    """
    from .embeddings import as_matrix

    f = as_matrix(views)
    y = np.asarray(y, dtype=np.float64)
    m = np.asarray(m_init, dtype=np.float64).copy()
    inv_h = h_sq.inv_h_sq

    flags: list[str] = []
    steps: list[float] = []
    u_trace: list[float] = []
    trajectory: list[np.ndarray] | None = [m.copy()] if record_trajectory else None

    n_iter = 0
    while True:
        m_new, u, denom = backend.m_step(f, y, m, inv_h)
        u_trace.append(u)
        if denom < 1e-300:
            flags.append(FLAG_VANISHING_WEIGHTS)
            m = m_new
            n_iter += 1
            steps.append(0.0)
            break
        n_iter += 1
        step = float(np.linalg.norm(m_new - m))
        steps.append(step)
        if trajectory is not None:
            trajectory.append(m_new.copy())
        m = m_new
        if step < params.epsilon:
            break
        if n_iter >= params.max_inner_m:
            flags.append(FLAG_MAX_INNER_M)
            break

    # close the trace with the density at the final iterate
    k_final = backend.gaussian_weights(f, m, inv_h)
    u_trace.append(float(y @ k_final))

    return MPhase(
        m=m,
        iterations=n_iter,
        u_trace=np.asarray(u_trace),
        step_norms=np.asarray(steps),
        trajectory=trajectory,
        flags=tuple(dict.fromkeys(flags)),
    )


def build_affinity(
    views: EmbeddingSet, classes: ClassEmbeddings, params: Hyperparams
) -> AffinityMatrix:
    """Affinity matrix for one sample; independent of m and y, built once."""
    if params.affinity_kind == "text":
        return text_affinity(softmax_predictions(views, classes), params.diagonal_mode)
    return vision_affinity(views, params.diagonal_mode)


def mta_solve(
    views: EmbeddingSet,
    classes: ClassEmbeddings,
    params: Hyperparams | None = None,
    w: AffinityMatrix | None = None,
    record_y_objectives: bool = False,
    record_y_iterates: bool = False,
    record_m_trajectory: bool = False,
    descent_tol: float = 1e-8,
) -> SolveResult:
    """Run the full block-coordinate solve for one sample.

    The mode is initialized at the original view's embedding and y uniform.
    Outer iterations alternate the y block and the m block until both move
    less than epsilon (max-norm for y, L2 for m) or max_outer is hit.
    Non-convergence is reported through trace flags, never raised.

    With filtering="uniform" the y block is skipped entirely and y stays
    uniform, which reproduces the classic mode-seeking baseline.
    """
    params = params or Hyperparams()
    if params.filtering == "confidence_threshold":
        raise ValueError(
            "confidence_threshold filtering is a view-selection baseline; "
            "use predictors.baseline_confidence_threshold"
        )

    if w is None:
        w = build_affinity(views, classes, params)
    h_sq = variable_bandwidth(views, params.rho)

    n = views.n_views
    m = views.original.copy()
    y = uniform_simplex(n)

    trace = ConvergenceTrace()
    flags: list[str] = []
    violations = 0

    for _outer in range(params.max_outer):
        y_prev, m_prev = y, m

        if params.filtering == "uniform":
            yp = YPhase(y=y, iterations=0, step_norms=np.empty(0))
        else:
            kernels = backend.gaussian_weights(views.views, m, h_sq.inv_h_sq)
            yp = solve_y(
                kernels,
                w,
                y,
                params,
                record_objectives=record_y_objectives,
                record_iterates=record_y_iterates,
            )
            y = yp.y
            if yp.objectives is not None:
                violations += int((np.diff(yp.objectives) > descent_tol).sum())

        mp = solve_m(views, y, m, h_sq, params, record_trajectory=record_m_trajectory)
        m = mp.m

        flags.extend(yp.flags)
        flags.extend(mp.flags)

        delta_y = float(np.abs(y - y_prev).max()) if n else 0.0
        delta_m = float(np.linalg.norm(m - m_prev))
        trace.outer.append(
            OuterRecord(
                y_iterations=yp.iterations,
                m_iterations=mp.iterations,
                objective=objective_from_kernels(
                    backend.gaussian_weights(views.views, m, h_sq.inv_h_sq),
                    y,
                    w.w,
                    params.lam,
                    params.lam_y,
                ),
                u_trace=mp.u_trace,
                y_step_norms=yp.step_norms,
                m_step_norms=mp.step_norms,
                y_objectives=yp.objectives,
                delta_y=delta_y,
                delta_m=delta_m,
                y_iterates=yp.iterates,
                m_trajectory=mp.trajectory,
            )
        )

        if delta_y < params.epsilon and delta_m < params.epsilon:
            trace.converged = True
            break
    else:
        flags.append(FLAG_MAX_OUTER)

    trace.flags = tuple(dict.fromkeys(flags))
    trace.descent_violations = violations
    return SolveResult(mode=m, inlierness=y, trace=trace, w=w, h_sq=h_sq)


def classic_meanshift(
    views,
    m_init: np.ndarray,
    h_sq: BandwidthVector,
    params: Hyperparams,
    record_trajectory: bool = False,
) -> MPhase:
    """Mode seeking with uniform weights: the plain fixed-point iteration."""
    from .embeddings import as_matrix

    f = as_matrix(views)
    y = uniform_simplex(f.shape[0])
    return solve_m(f, y, m_init, h_sq, params, record_trajectory=record_trajectory)
