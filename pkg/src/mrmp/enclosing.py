"""Exact smallest enclosing balls in 2 or 3 dimensions.

Randomized incremental computation (expected linear in the point count) with a
fixed shuffle seed so repeated calls on the same input are identical; inputs
too small for ordering to matter skip the shuffle. Implemented over plain
tuples: the point sets here are tiny (one per robot), where interpreter
overhead dominates vectorization.
"""

from __future__ import annotations

import math
import random

import numpy as np

_SHUFFLE_SEED = 0x5EB
_MULT_EPS = 1.0 + 1e-13


# ---------------------------------------------------------------------------
# planar case: iterative incremental construction


def _in_circle(c: tuple[float, float, float], p: tuple[float, float]) -> bool:
    dx = p[0] - c[0]
    dy = p[1] - c[1]
    return math.sqrt(dx * dx + dy * dy) <= c[2] * _MULT_EPS + 1e-30


def _diameter(p, q) -> tuple[float, float, float]:
    cx = 0.5 * (p[0] + q[0])
    cy = 0.5 * (p[1] + q[1])
    r = max(math.hypot(cx - p[0], cy - p[1]), math.hypot(cx - q[0], cy - q[1]))
    return (cx, cy, r)


def _circumcircle(p, q, r) -> tuple[float, float, float] | None:
    ox = (min(p[0], q[0], r[0]) + max(p[0], q[0], r[0])) * 0.5
    oy = (min(p[1], q[1], r[1]) + max(p[1], q[1], r[1])) * 0.5
    ax, ay = p[0] - ox, p[1] - oy
    bx, by = q[0] - ox, q[1] - oy
    cx, cy = r[0] - ox, r[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    x = ox + (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    y = oy + (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    rad = max(
        math.hypot(x - p[0], y - p[1]),
        math.hypot(x - q[0], y - q[1]),
        math.hypot(x - r[0], y - r[1]),
    )
    return (x, y, rad)


def _disc_two_boundary(pts, p, q):
    circ = _diameter(p, q)
    left = None
    right = None
    px, py = p
    qx, qy = q
    dqx, dqy = qx - px, qy - py
    for r in pts:
        if _in_circle(circ, r):
            continue
        cross = dqx * (r[1] - py) - dqy * (r[0] - px)
        c = _circumcircle(p, q, r)
        if c is None:
            continue
        d = dqx * (c[1] - py) - dqy * (c[0] - px)
        if cross > 0.0 and (left is None or d > dqx * (left[1] - py) - dqy * (left[0] - px)):
            left = c
        elif cross < 0.0 and (right is None or d < dqx * (right[1] - py) - dqy * (right[0] - px)):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _disc_one_boundary(pts, p):
    c = (p[0], p[1], 0.0)
    for i, q in enumerate(pts):
        if not _in_circle(c, q):
            if c[2] == 0.0:
                c = _diameter(p, q)
            else:
                c = _disc_two_boundary(pts[: i + 1], p, q)
    return c


def _disc_2d(pts: list[tuple]) -> tuple[tuple, float]:
    if len(pts) > 8:
        pts = pts[:]
        random.Random(_SHUFFLE_SEED).shuffle(pts)
    c = None
    for i, p in enumerate(pts):
        if c is None or not _in_circle(c, p):
            c = _disc_one_boundary(pts[: i + 1], p)
    # report the radius that actually covers the input points
    radius = max(math.hypot(p[0] - c[0], p[1] - c[1]) for p in pts)
    return (c[0], c[1]), radius


# ---------------------------------------------------------------------------
# 3D case: recursive move-to-front construction


def _dist2(a, b) -> float:
    acc = 0.0
    for x, y in zip(a, b):
        d = x - y
        acc += d * d
    return acc


def _solve_gram(g: list[list[float]], rhs: list[float]) -> list[float]:
    """Gaussian elimination with partial pivoting; near-zero pivots are skipped
    (degenerate support directions contribute nothing to the center)."""
    k = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(g)]
    scale = max(max(abs(v) for v in row[:-1]) for row in a) or 1.0
    for col in range(k):
        piv = max(range(col, k), key=lambda r: abs(a[r][col]))
        if abs(a[piv][col]) <= 1e-12 * scale:
            a[col] = [0.0] * (k + 1)
            continue
        a[col], a[piv] = a[piv], a[col]
        inv = 1.0 / a[col][col]
        for r in range(k):
            if r != col and a[r][col] != 0.0:
                f = a[r][col] * inv
                for c in range(col, k + 1):
                    a[r][c] -= f * a[col][c]
    out = []
    for i in range(k):
        out.append(a[i][k] / a[i][i] if a[i][i] != 0.0 else 0.0)
    return out


def _ball_of_support(support: list[tuple]) -> tuple[tuple, float] | None:
    if not support:
        return None
    p0 = support[0]
    k = len(support) - 1
    if k == 0:
        return p0, 0.0
    dim = len(p0)
    u = [tuple(p[i] - p0[i] for i in range(dim)) for p in support[1:]]
    if k == 1:
        center = tuple(p0[i] + 0.5 * u[0][i] for i in range(dim))
    else:
        gram = [[sum(ui[i] * uj[i] for i in range(dim)) for uj in u] for ui in u]
        rhs = [0.5 * sum(ui[i] * ui[i] for i in range(dim)) for ui in u]
        lam = _solve_gram(gram, rhs)
        center = tuple(p0[i] + sum(lam[j] * u[j][i] for j in range(k)) for i in range(dim))
    radius = math.sqrt(max(_dist2(p, center) for p in support))
    return center, radius


def _welzl(pts: list[tuple], n: int, support: list[tuple]) -> tuple[tuple, float] | None:
    dim = len(pts[0])
    if n == 0 or len(support) == dim + 1:
        return _ball_of_support(support)
    p = pts[n - 1]
    ball = _welzl(pts, n - 1, support)
    if ball is not None:
        center, radius = ball
        if _dist2(p, center) <= (radius * _MULT_EPS) ** 2 + 1e-30:
            return ball
    return _welzl(pts, n - 1, support + [p])


def _ball_3d(pts: list[tuple]) -> tuple[tuple, float]:
    if len(pts) > 8:
        pts = pts[:]
        random.Random(_SHUFFLE_SEED).shuffle(pts)
    ball = _welzl(pts, len(pts), [])
    assert ball is not None
    center, radius = ball
    worst = math.sqrt(max(_dist2(p, center) for p in pts))
    return center, max(radius, worst)


# ---------------------------------------------------------------------------
# public interface


def _enclosing(pts: list[tuple]) -> tuple[tuple, float]:
    if len(pts[0]) == 2:
        return _disc_2d(pts)
    return _ball_3d(pts)


def smallest_enclosing_ball(points) -> tuple[np.ndarray, float]:
    """Center and radius of the smallest ball enclosing (n, d) points, d in {2, 3}."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError("expected an (n, 2) or (n, 3) point array")
    if arr.shape[0] == 0:
        return np.zeros(arr.shape[1]), 0.0
    center, radius = _enclosing([tuple(row) for row in arr.tolist()])
    return np.asarray(center), radius


def enclosing_radius(points) -> float:
    arr = np.asarray(points, dtype=float)
    if arr.shape[0] == 0:
        return 0.0
    return _enclosing([tuple(row) for row in arr.tolist()])[1]


def enclosing_radius_tuples(pts: list[tuple]) -> float:
    """Radius for an already-materialized list of coordinate tuples."""
    return _enclosing(pts)[1]
