"""Brute-force reference implementations used as test oracles.

These deliberately avoid the library's own algorithms: translation-alignment
values come from grid search with local refinement, nearest neighbors from a
plain argmin loop, and the planar metric formulas are written out directly.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize

from mrmp.metrics import Metric, evaluate


def _refined_grid_min(objective, lo, hi, grid=21, target=1e-4):
    """Minimize a convex objective: coarse grid, then local simplex refinement.

    The grid brackets the optimum; Nelder-Mead polishes it well below the
    target tolerance (the objectives here are convex, so local means global).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    axes = [np.linspace(lo[d], hi[d], grid) for d in range(len(lo))]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    vals = objective(mesh)
    best_x = mesh[int(np.argmin(vals))]
    res = minimize(
        lambda x: float(objective(x[None, :])[0]),
        best_x,
        method="Nelder-Mead",
        options={"xatol": target * 1e-2, "fatol": 1e-12, "maxiter": 4000},
    )
    return float(min(res.fun, objective(best_x[None, :])[0]))


def grid_eps2(deltas: np.ndarray) -> float:
    """min over translations t of max_i ||t - delta_i||_2 (grid + refinement)."""
    lo = deltas.min(axis=0) - 1.0
    hi = deltas.max(axis=0) + 1.0

    def objective(ts):
        diff = ts[:, None, :] - deltas[None, :, :]
        return np.sqrt((diff**2).sum(axis=2)).max(axis=1)

    return _refined_grid_min(objective, lo, hi)


def grid_epsinf(deltas: np.ndarray) -> float:
    """min over translations t of max_i ||t - delta_i||_inf."""
    lo = deltas.min(axis=0) - 1.0
    hi = deltas.max(axis=0) + 1.0

    def objective(ts):
        diff = np.abs(ts[:, None, :] - deltas[None, :, :])
        return diff.max(axis=2).max(axis=1)

    return _refined_grid_min(objective, lo, hi)


def grid_ctd(deltas: np.ndarray) -> float:
    """min over translations t of sum_i ||t - delta_i||^2."""
    lo = deltas.min(axis=0) - 1.0
    hi = deltas.max(axis=0) + 1.0

    def objective(ts):
        diff = ts[:, None, :] - deltas[None, :, :]
        return (diff**2).sum(axis=2).sum(axis=1)

    return _refined_grid_min(objective, lo, hi)


def linear_scan_nearest(metric: Metric, items, Q):
    """Reference nearest-neighbor semantics: argmin of evaluate, ties to low id."""
    best = None
    for item_id, config in items:
        d = evaluate(metric, config, Q)
        if best is None or d < best[1] or (d == best[1] and item_id < best[0]):
            best = (item_id, d)
    return best


# plain planar formulas (translation-only), written independently of the
# library's weighted implementations


def planar_sum_l2(U, V) -> float:
    return sum(math.sqrt((v.x - u.x) ** 2 + (v.y - u.y) ** 2) for u, v in zip(U, V))


def planar_max_l2(U, V) -> float:
    return max(math.sqrt((v.x - u.x) ** 2 + (v.y - u.y) ** 2) for u, v in zip(U, V))


def planar_ctd(U, V) -> float:
    xs = [v.x - u.x for u, v in zip(U, V)]
    ys = [v.y - u.y for u, v in zip(U, V)]
    m = len(xs)
    return sum(x * x for x in xs) + sum(y * y for y in ys) - (sum(xs) ** 2 + sum(ys) ** 2) / m


def deltas_of(U, V) -> np.ndarray:
    return np.array([[v.x - u.x, v.y - u.y] for u, v in zip(U, V)])
