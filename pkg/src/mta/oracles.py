"""Independent verification oracles for completed solves.

The grid oracle brute-forces the joint objective over a dense 2-D mode grid
(solving the inlierness block exactly at every grid point, through the same
code path the solver uses). The stationarity oracle checks first-order
conditions at a returned solution: a central finite-difference gradient in
the mode and a single recomputation of the inlierness update.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .affinity import AffinityMatrix
from .bandwidth import variable_bandwidth
from .embeddings import ClassEmbeddings, EmbeddingSet
from .errors import DimensionTooLarge
from .solver import (
    Hyperparams,
    SolveResult,
    build_affinity,
    cccp_y_update,
    objective_from_kernels,
    solve_y,
    uniform_simplex,
)

GRID_MAX_VIEWS = 8


@dataclass
class GridOracleResult:
    min_objective: float
    argmin: np.ndarray
    resolution: int


@dataclass
class StationarityReport:
    grad_norm: float
    y_residual_inf: float
    fd_step: float


def grid_oracle(
    views: EmbeddingSet,
    classes: ClassEmbeddings,
    params: Hyperparams | None = None,
    grid_resolution: int = 200,
    w: AffinityMatrix | None = None,
) -> GridOracleResult:
    """Exhaustive objective minimum over a 2-D mode grid.

    The box spans the views' bounding box padded by one (maximal) bandwidth
    on each side. At each grid point the inlierness block is solved to
    convergence from uniform, exactly as the solver would.
    """
    params = params or Hyperparams()
    if views.dim != 2:
        raise DimensionTooLarge("grid oracle only runs for dim = 2")
    if views.n_views > GRID_MAX_VIEWS:
        raise DimensionTooLarge(f"grid oracle only runs for N <= {GRID_MAX_VIEWS}")

    if w is None:
        w = build_affinity(views, classes, params)
    h_sq = variable_bandwidth(views, params.rho)
    inv_h = h_sq.inv_h_sq
    margin = float(np.sqrt(h_sq.h_sq.max()))

    lo = views.views.min(axis=0) - margin
    hi = views.views.max(axis=0) + margin
    xs = np.linspace(lo[0], hi[0], grid_resolution)
    ys = np.linspace(lo[1], hi[1], grid_resolution)

    y0 = uniform_simplex(views.n_views)
    best = np.inf
    best_m = views.original.copy()
    f = views.views
    for x in xs:
        for yv in ys:
            m = np.array([x, yv])
            kern = backend.gaussian_weights(f, m, inv_h)
            phase = solve_y(kern, w, y0, params)
            val = objective_from_kernels(kern, phase.y, w.w, params.lam, params.lam_y)
            if val < best:
                best = val
                best_m = m
    return GridOracleResult(min_objective=best, argmin=best_m, resolution=grid_resolution)


def stationarity_oracle(
    views: EmbeddingSet,
    classes: ClassEmbeddings,
    solution: SolveResult,
    params: Hyperparams | None = None,
    fd_step: float = 1e-5,
) -> StationarityReport:
    """First-order residuals at a completed solve.

    Reports the central finite-difference gradient norm of the objective in
    the mode at (m*, y*), and the infinity-norm change from recomputing one
    inlierness update at the solution.
    """
    params = params or Hyperparams()
    f = views.views
    w = solution.w
    h_sq = solution.h_sq
    inv_h = h_sq.inv_h_sq
    m_star = solution.mode
    y_star = solution.inlierness

    def value(m: np.ndarray) -> float:
        kern = backend.gaussian_weights(f, m, inv_h)
        return objective_from_kernels(kern, y_star, w.w, params.lam, params.lam_y)

    grad = np.empty_like(m_star)
    for j in range(m_star.shape[0]):
        shift = np.zeros_like(m_star)
        shift[j] = fd_step
        grad[j] = (value(m_star + shift) - value(m_star - shift)) / (2.0 * fd_step)

    kern = backend.gaussian_weights(f, m_star, inv_h)
    y_new = cccp_y_update(kern, w, y_star, params)
    return StationarityReport(
        grad_norm=float(np.linalg.norm(grad)),
        y_residual_inf=float(np.abs(y_new - y_star).max()),
        fd_step=fd_step,
    )
