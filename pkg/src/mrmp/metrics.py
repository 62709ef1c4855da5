"""The five multi-robot configuration-space metrics.

sum_l2 and max_l2 extend the single-robot Euclidean distance; eps2 and epsinf
measure the tolerance needed to translate one configuration onto the other
(smallest enclosing ball / axis-aligned cube of the per-robot displacement
points); centroid_dist is the residual sum of squares after removing the best
common translation. Rotating robots are handled by a weight s in [0, 1] that
scales translation against the wrapped angular difference; s=1 reduces every
metric to its pure-translation form.

Scalar operations take JointConfigs; the *_pairs batch kernels take (n, m, 3)
arrays and mirror the scalar arithmetic operation-for-operation so that both
paths produce identical floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from .enclosing import enclosing_radius_tuples
from .geometry import JointConfig

TWO_PI = 2.0 * math.pi


class MetricKind(str, Enum):
    SUM_L2 = "sum_l2"
    MAX_L2 = "max_l2"
    EPS2 = "eps2"
    EPS_INF = "epsinf"
    CTD = "ctd"


ALL_KINDS = tuple(MetricKind)


@dataclass(frozen=True)
class Metric:
    """A metric kind plus the translation/rotation weight (s=1: translation only)."""

    kind: MetricKind
    s: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"weight s={self.s} outside [0, 1]")

    @property
    def label(self) -> str:
        return self.kind.value if self.s == 1.0 else f"{self.kind.value}[s={self.s:g}]"


def parse_metric(kind: str, s: float = 1.0) -> Metric:
    try:
        return Metric(MetricKind(kind), s)
    except ValueError as exc:
        raise ValueError(f"unknown metric kind {kind!r}") from exc


# ---------------------------------------------------------------------------
# scalar operations


def displacement(U: JointConfig, V: JointConfig, s: float = 1.0) -> list[tuple[float, float, float]]:
    """Per-robot scaled displacement components (s*dx, s*dy, (1-s)*dtheta).

    dtheta is the absolute angular difference wrapped into [0, pi].
    """
    if len(U) != len(V):
        raise ValueError("configurations must have the same robot count")
    out = []
    for u, v in zip(U, V):
        d = abs(v.theta - u.theta)
        d = math.fmod(d, TWO_PI)
        if d >= math.pi:
            d = TWO_PI - d
        out.append((s * (v.x - u.x), s * (v.y - u.y), (1.0 - s) * d))
    return out


def sum_l2(U: JointConfig, V: JointConfig, s: float = 1.0) -> float:
    total = 0.0
    for dx, dy, dth in displacement(U, V, s):
        total += math.sqrt(dx * dx + dy * dy) + dth
    return total


def max_l2(U: JointConfig, V: JointConfig, s: float = 1.0) -> float:
    best = 0.0
    for dx, dy, dth in displacement(U, V, s):
        term = math.sqrt(dx * dx + dy * dy) + dth
        if term > best:
            best = term
    return best


def eps2(U: JointConfig, V: JointConfig, s: float = 1.0) -> float:
    disp = displacement(U, V, s)
    if all(d[2] == 0.0 for d in disp):
        pts: list[tuple] = [(d[0], d[1]) for d in disp]
    else:
        pts = disp
    return enclosing_radius_tuples(pts)


def epsinf(U: JointConfig, V: JointConfig, s: float = 1.0) -> float:
    disp = displacement(U, V, s)
    lo = [min(d[k] for d in disp) for k in range(3)]
    hi = [max(d[k] for d in disp) for k in range(3)]
    return 0.5 * max(hi[k] - lo[k] for k in range(3))


def centroid_dist(U: JointConfig, V: JointConfig, s: float = 1.0) -> float:
    """Residual sum of squares about the displacement centroid (squared-length units)."""
    m = len(U)
    sq = 0.0
    sx = sy = sth = 0.0
    for dx, dy, dth in displacement(U, V, s):
        sq += dx * dx + dy * dy + dth * dth
        sx += dx
        sy += dy
        sth += dth
    val = sq - (sx * sx + sy * sy + sth * sth) / m
    return val if val > 0.0 else 0.0


_SCALAR_OPS = {
    MetricKind.SUM_L2: sum_l2,
    MetricKind.MAX_L2: max_l2,
    MetricKind.EPS2: eps2,
    MetricKind.EPS_INF: epsinf,
    MetricKind.CTD: centroid_dist,
}


def evaluate(metric: Metric, U: JointConfig, V: JointConfig) -> float:
    """Dispatch to the operation matching metric.kind with metric.s."""
    return _SCALAR_OPS[metric.kind](U, V, metric.s)


# ---------------------------------------------------------------------------
# batch kernels over (n, m, 3) configuration arrays


def displacement_pairs(A: np.ndarray, B: np.ndarray, s: float = 1.0) -> np.ndarray:
    """Scaled displacements for n configuration pairs: (n, m, 3) -> (n, m, 3)."""
    out = np.empty_like(A)
    out[..., 0] = s * (B[..., 0] - A[..., 0])
    out[..., 1] = s * (B[..., 1] - A[..., 1])
    if s == 1.0:
        # the rotation weight is exactly zero; skip the wrap arithmetic
        out[..., 2] = 0.0
    else:
        d = np.abs(B[..., 2] - A[..., 2])
        d = np.fmod(d, TWO_PI)
        out[..., 2] = (1.0 - s) * np.where(d >= math.pi, TWO_PI - d, d)
    return out


def _terms(disp: np.ndarray) -> np.ndarray:
    return np.sqrt(disp[..., 0] * disp[..., 0] + disp[..., 1] * disp[..., 1]) + disp[..., 2]


def _sum_sequential(arr: np.ndarray) -> np.ndarray:
    # left-to-right accumulation over the robot axis, matching the scalar loop
    acc = arr[:, 0].copy()
    for i in range(1, arr.shape[1]):
        acc += arr[:, i]
    return acc


def sum_l2_pairs(A: np.ndarray, B: np.ndarray, s: float = 1.0) -> np.ndarray:
    return _sum_sequential(_terms(displacement_pairs(A, B, s)))


def max_l2_pairs(A: np.ndarray, B: np.ndarray, s: float = 1.0) -> np.ndarray:
    return _terms(displacement_pairs(A, B, s)).max(axis=1)


def epsinf_pairs(A: np.ndarray, B: np.ndarray, s: float = 1.0) -> np.ndarray:
    disp = displacement_pairs(A, B, s)
    ext = disp.max(axis=1) - disp.min(axis=1)
    return 0.5 * ext.max(axis=1)


def centroid_dist_pairs(A: np.ndarray, B: np.ndarray, s: float = 1.0) -> np.ndarray:
    disp = displacement_pairs(A, B, s)
    m = disp.shape[1]
    sq = _sum_sequential(disp[..., 0] ** 2 + disp[..., 1] ** 2 + disp[..., 2] ** 2)
    sx = _sum_sequential(disp[..., 0])
    sy = _sum_sequential(disp[..., 1])
    sth = _sum_sequential(disp[..., 2])
    val = sq - (sx * sx + sy * sy + sth * sth) / m
    return np.maximum(val, 0.0)


def _miniball_radius_2d(P: np.ndarray) -> np.ndarray:
    """Exact enclosing-disc radii for n point sets of m <= 8 planar points.

    Enumerates every 2-subset diameter disc and 3-subset circumdisc, keeps the
    candidates covering all points, and returns the smallest covering radius.
    """
    n, m, _ = P.shape
    if m == 1:
        return np.zeros(n)
    pair_idx = list(combinations(range(m), 2))
    pi = np.array([p[0] for p in pair_idx])
    pj = np.array([p[1] for p in pair_idx])
    centers = [0.5 * (P[:, pi, :] + P[:, pj, :])]

    if m >= 3:
        trip_idx = list(combinations(range(m), 3))
        ti = np.array([t[0] for t in trip_idx])
        tj = np.array([t[1] for t in trip_idx])
        tk = np.array([t[2] for t in trip_idx])
        ax, ay = P[:, ti, 0], P[:, ti, 1]
        bx, by = P[:, tj, 0], P[:, tj, 1]
        cx, cy = P[:, tk, 0], P[:, tk, 1]
        d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        scale = np.maximum.reduce([np.abs(ax), np.abs(ay), np.abs(bx), np.abs(by), np.abs(cx), np.abs(cy), np.ones_like(d)])
        good = np.abs(d) > 1e-12 * scale * scale
        d_safe = np.where(good, d, 1.0)
        a2 = ax * ax + ay * ay
        b2 = bx * bx + by * by
        c2 = cx * cx + cy * cy
        ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d_safe
        uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d_safe
        tri_centers = np.stack([ux, uy], axis=-1)
        tri_centers[~good] = np.inf
        centers.append(tri_centers)

    cand = np.concatenate(centers, axis=1)  # (n, C, 2)
    with np.errstate(invalid="ignore"):
        diff = P[:, None, :, :] - cand[:, :, None, :]
        cover_r2 = np.einsum("ncmk,ncmk->ncm", diff, diff).max(axis=2)
    cover_r2 = np.where(np.isfinite(cover_r2), cover_r2, np.inf)
    # the optimal candidate is the one with the smallest radius that covers all
    # points; covering radius == nominal radius for valid candidates
    best = cover_r2.min(axis=1)
    return np.sqrt(best)


def eps2_pairs(A: np.ndarray, B: np.ndarray, s: float = 1.0) -> np.ndarray:
    disp = displacement_pairs(A, B, s)
    if (disp[..., 2] == 0.0).all():
        if disp.shape[1] <= 8:
            return _miniball_radius_2d(disp[..., :2])
        return np.array(
            [enclosing_radius_tuples([tuple(p[:2]) for p in row.tolist()]) for row in disp]
        )
    return np.array(
        [enclosing_radius_tuples([tuple(p) for p in row.tolist()]) for row in disp]
    )


PAIR_OPS = {
    MetricKind.SUM_L2: sum_l2_pairs,
    MetricKind.MAX_L2: max_l2_pairs,
    MetricKind.EPS2: eps2_pairs,
    MetricKind.EPS_INF: epsinf_pairs,
    MetricKind.CTD: centroid_dist_pairs,
}


def evaluate_pairs(metric: Metric, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Metric values for n aligned configuration pairs given as (n, m, 3) arrays."""
    return PAIR_OPS[metric.kind](A, B, metric.s)
