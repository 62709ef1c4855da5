"""Planar workspace geometry for labeled multi-robot systems.

Robots are translating discs (optionally rotating polygons); the workspace is a
simple polygon with polygonal holes. Collision checking is by discretized
sampling along straight-line joint motions, with tangency counting as a
collision so that the free space is open.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

Vec2 = tuple[float, float]


class Pose(NamedTuple):
    """Single-robot configuration: planar position plus heading in [-pi, pi)."""

    x: float
    y: float
    theta: float = 0.0


# A joint configuration is one Pose per robot, index i always meaning robot i.
JointConfig = tuple[Pose, ...]


def normalize_angle(theta: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    t = math.fmod(theta + math.pi, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    return t - math.pi


def wrapped_angle_diff(a: float, b: float) -> float:
    """Absolute angular difference |a - b| wrapped into [0, pi]."""
    d = abs(a - b)
    d = math.fmod(d, TWO_PI)
    return d if d < math.pi else TWO_PI - d


def joint_config(coords: Sequence[Sequence[float]]) -> JointConfig:
    """Build a JointConfig from [x, y] or [x, y, theta] rows."""
    poses = []
    for row in coords:
        if len(row) == 2:
            poses.append(Pose(float(row[0]), float(row[1]), 0.0))
        else:
            poses.append(Pose(float(row[0]), float(row[1]), normalize_angle(float(row[2]))))
    return tuple(poses)


def config_array(U: JointConfig) -> np.ndarray:
    """(m, 3) float array of a joint configuration."""
    return np.asarray(U, dtype=float).reshape(len(U), 3)


@dataclass(frozen=True)
class Segment:
    """Straight-line joint motion between two configurations of equal robot count."""

    a: JointConfig
    b: JointConfig

    def __post_init__(self) -> None:
        if len(self.a) != len(self.b):
            raise ValueError("segment endpoints must have the same robot count")


# ---------------------------------------------------------------------------
# polygon primitives


def polygon_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def points_in_polygon(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Winding-number containment test, vectorized over points.

    Points exactly on an edge are classified arbitrarily; callers that need the
    open/closed distinction must pair this with a distance or intersection test.
    """
    px = points[:, 0:1]
    py = points[:, 1:2]
    x1 = poly[None, :, 0]
    y1 = poly[None, :, 1]
    x2 = np.roll(poly[:, 0], -1)[None, :]
    y2 = np.roll(poly[:, 1], -1)[None, :]
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    upward = (y1 <= py) & (y2 > py) & (cross > 0)
    downward = (y1 > py) & (y2 <= py) & (cross < 0)
    wn = upward.sum(axis=1) - downward.sum(axis=1)
    return wn != 0


def min_distance_to_segments(points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """Min Euclidean distance from each point to a set of segments."""
    d = seg_b - seg_a
    len2 = np.einsum("ij,ij->i", d, d)
    len2_safe = np.where(len2 > 0.0, len2, 1.0)
    ap = points[:, None, :] - seg_a[None, :, :]
    t = np.clip(np.einsum("nij,ij->ni", ap, d) / len2_safe[None, :], 0.0, 1.0)
    closest = seg_a[None, :, :] + t[..., None] * d[None, :, :]
    diff = points[:, None, :] - closest
    return np.sqrt(np.einsum("nij,nij->ni", diff, diff)).min(axis=1)


def _orient(ox, oy, px, py, qx, qy):
    return (px - ox) * (qy - oy) - (py - oy) * (qx - ox)


def segments_intersect_batch(a1: np.ndarray, a2: np.ndarray, b1: np.ndarray, b2: np.ndarray) -> np.ndarray:
    """Closed segment-intersection test for all pairs: (K,2) segs vs (L,2) segs -> (K,L).

    Touching endpoints and collinear overlap count as intersection (tangency is
    a collision in this library).
    """
    ax1, ay1 = a1[:, None, 0], a1[:, None, 1]
    ax2, ay2 = a2[:, None, 0], a2[:, None, 1]
    bx1, by1 = b1[None, :, 0], b1[None, :, 1]
    bx2, by2 = b2[None, :, 0], b2[None, :, 1]

    d1 = _orient(bx1, by1, bx2, by2, ax1, ay1)
    d2 = _orient(bx1, by1, bx2, by2, ax2, ay2)
    d3 = _orient(ax1, ay1, ax2, ay2, bx1, by1)
    d4 = _orient(ax1, ay1, ax2, ay2, bx2, by2)

    proper = (((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))) & (
        ((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0))
    )

    def on_seg(px, py, sx1, sy1, sx2, sy2):
        return (
            (px <= np.maximum(sx1, sx2))
            & (px >= np.minimum(sx1, sx2))
            & (py <= np.maximum(sy1, sy2))
            & (py >= np.minimum(sy1, sy2))
        )

    touch = (
        ((d1 == 0) & on_seg(ax1, ay1, bx1, by1, bx2, by2))
        | ((d2 == 0) & on_seg(ax2, ay2, bx1, by1, bx2, by2))
        | ((d3 == 0) & on_seg(bx1, by1, ax1, ay1, ax2, ay2))
        | ((d4 == 0) & on_seg(bx2, by2, ax1, ay1, ax2, ay2))
    )
    return proper | touch


def _poly_edges(poly: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return poly, np.roll(poly, -1, axis=0)


def polygons_disjoint(pa: np.ndarray, pb: np.ndarray) -> bool:
    """True iff two simple polygons have disjoint closed footprints."""
    a1, a2 = _poly_edges(pa)
    b1, b2 = _poly_edges(pb)
    if segments_intersect_batch(a1, a2, b1, b2).any():
        return False
    if points_in_polygon(pa[:1], pb).any() or points_in_polygon(pb[:1], pa).any():
        return False
    return True


def points_in_polygons_batch(points: np.ndarray, polys: np.ndarray) -> np.ndarray:
    """Winding containment of fixed points (C, 2) in per-row polygons (N, V, 2) -> (N, C)."""
    px = points[None, :, None, 0]
    py = points[None, :, None, 1]
    x1 = polys[:, None, :, 0]
    y1 = polys[:, None, :, 1]
    rolled = np.roll(polys, -1, axis=1)
    x2 = rolled[:, None, :, 0]
    y2 = rolled[:, None, :, 1]
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    upward = (y1 <= py) & (y2 > py) & (cross > 0)
    downward = (y1 > py) & (y2 <= py) & (cross < 0)
    wn = upward.sum(axis=2) - downward.sum(axis=2)
    return wn != 0


def polygons_disjoint_paired(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    """Disjointness of polygon pairs row by row: (T, Va, 2) vs (T, Vb, 2) -> (T,)."""
    a1 = pa
    a2 = np.roll(pa, -1, axis=1)
    b1 = pb
    b2 = np.roll(pb, -1, axis=1)
    ax1, ay1 = a1[:, :, None, 0], a1[:, :, None, 1]
    ax2, ay2 = a2[:, :, None, 0], a2[:, :, None, 1]
    bx1, by1 = b1[:, None, :, 0], b1[:, None, :, 1]
    bx2, by2 = b2[:, None, :, 0], b2[:, None, :, 1]

    d1 = _orient(bx1, by1, bx2, by2, ax1, ay1)
    d2 = _orient(bx1, by1, bx2, by2, ax2, ay2)
    d3 = _orient(ax1, ay1, ax2, ay2, bx1, by1)
    d4 = _orient(ax1, ay1, ax2, ay2, bx2, by2)
    proper = (((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))) & (
        ((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0))
    )

    def on_seg(px, py, sx1, sy1, sx2, sy2):
        return (
            (px <= np.maximum(sx1, sx2))
            & (px >= np.minimum(sx1, sx2))
            & (py <= np.maximum(sy1, sy2))
            & (py >= np.minimum(sy1, sy2))
        )

    touch = (
        ((d1 == 0) & on_seg(ax1, ay1, bx1, by1, bx2, by2))
        | ((d2 == 0) & on_seg(ax2, ay2, bx1, by1, bx2, by2))
        | ((d3 == 0) & on_seg(bx1, by1, ax1, ay1, ax2, ay2))
        | ((d4 == 0) & on_seg(bx2, by2, ax1, ay1, ax2, ay2))
    )
    hit = (proper | touch).any(axis=(1, 2))

    # containment without edge crossing: test one vertex of each in the other
    def inside_first(pts, polys):
        px = pts[:, 0:1, 0]
        py = pts[:, 0:1, 1]
        x1 = polys[:, :, 0]
        y1 = polys[:, :, 1]
        rolled = np.roll(polys, -1, axis=1)
        x2 = rolled[:, :, 0]
        y2 = rolled[:, :, 1]
        cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
        upward = (y1 <= py) & (y2 > py) & (cross > 0)
        downward = (y1 > py) & (y2 <= py) & (cross < 0)
        return (upward.sum(axis=1) - downward.sum(axis=1)) != 0

    hit |= inside_first(pa, pb)
    hit |= inside_first(pb, pa)
    return ~hit


# ---------------------------------------------------------------------------
# disc / polygon areas (used by the substructure classifiers)


def _seg_circle_params(p1: np.ndarray, p2: np.ndarray, r: float) -> list[float]:
    d = p2 - p1
    a = float(d @ d)
    if a == 0.0:
        return []
    b = 2.0 * float(p1 @ d)
    c = float(p1 @ p1) - r * r
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return []
    s = math.sqrt(disc)
    return [t for t in ((-b - s) / (2 * a), (-b + s) / (2 * a)) if 0.0 < t < 1.0]


def disc_polygon_intersection_area(cx: float, cy: float, r: float, poly: Sequence[Vec2]) -> float:
    """Exact area of the intersection of a disc with a simple polygon.

    Decomposes the polygon into signed center-anchored wedges and clips each
    against the disc; works for CCW and CW polygons (sign of the result follows
    orientation, absolute value returned).
    """
    pts = np.asarray(poly, dtype=float) - np.array([cx, cy])
    r2 = r * r
    total = 0.0
    n = len(pts)
    for i in range(n):
        p1 = pts[i]
        p2 = pts[(i + 1) % n]
        chain = [p1]
        for t in _seg_circle_params(p1, p2, r):
            chain.append(p1 + t * (p2 - p1))
        chain.append(p2)
        for a, b in zip(chain, chain[1:]):
            mid = 0.5 * (a + b)
            if float(mid @ mid) <= r2:
                total += 0.5 * (a[0] * b[1] - a[1] * b[0])
            else:
                ang = math.atan2(b[1], b[0]) - math.atan2(a[1], a[0])
                if ang <= -math.pi:
                    ang += TWO_PI
                elif ang > math.pi:
                    ang -= TWO_PI
                total += 0.5 * r2 * ang
    return abs(total)


def rect_polygon(x0: float, y0: float, x1: float, y1: float) -> tuple[Vec2, ...]:
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


# ---------------------------------------------------------------------------
# workspace


class ValidationError(ValueError):
    """Raised when a workspace or scenario violates a structural invariant."""


@dataclass(frozen=True)
class Workspace:
    """Immutable planar workspace: outer boundary, holes, and the robot footprint.

    boundary is a CCW simple polygon; obstacles are simple polygons contained in
    it. robot_shape is "disc" (radius robot_radius) or a polygon given in the
    robot frame for rotating robots.
    """

    boundary: tuple[Vec2, ...]
    obstacles: tuple[tuple[Vec2, ...], ...] = ()
    robot_radius: float = 1.0
    robot_shape: str | tuple[Vec2, ...] = "disc"

    def __post_init__(self) -> None:
        if self.robot_radius <= 0:
            raise ValidationError("robot_radius must be positive")
        if len(self.boundary) < 3:
            raise ValidationError("boundary needs at least 3 vertices")
        for poly in (self.boundary, *self.obstacles):
            arr = np.asarray(poly, dtype=float)
            if not np.isfinite(arr).all():
                raise ValidationError("polygon coordinates must be finite")
        if polygon_area(np.asarray(self.boundary, dtype=float)) <= 0:
            raise ValidationError("boundary must be counter-clockwise")
        bound = np.asarray(self.boundary, dtype=float)
        for k, obs in enumerate(self.obstacles):
            arr = np.asarray(obs, dtype=float)
            eps = 1e-9
            inside = points_in_polygon(arr * (1 - eps) + arr.mean(axis=0) * eps, bound)
            if not inside.all():
                raise ValidationError(f"obstacle {k} is not contained in the boundary")

    # -- cached geometry --------------------------------------------------

    @cached_property
    def _boundary_arr(self) -> np.ndarray:
        return np.asarray(self.boundary, dtype=float)

    @cached_property
    def _obstacle_arrs(self) -> tuple[np.ndarray, ...]:
        return tuple(np.asarray(o, dtype=float) for o in self.obstacles)

    @cached_property
    def _all_edges(self) -> tuple[np.ndarray, np.ndarray]:
        starts = [self._boundary_arr]
        ends = [np.roll(self._boundary_arr, -1, axis=0)]
        for o in self._obstacle_arrs:
            starts.append(o)
            ends.append(np.roll(o, -1, axis=0))
        return np.concatenate(starts), np.concatenate(ends)

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        b = self._boundary_arr
        return float(b[:, 0].min()), float(b[:, 1].min()), float(b[:, 0].max()), float(b[:, 1].max())

    @cached_property
    def is_disc(self) -> bool:
        return self.robot_shape == "disc"

    @cached_property
    def _shape_arr(self) -> np.ndarray:
        if self.is_disc:
            raise ValueError("disc robots have no shape polygon")
        return np.asarray(self.robot_shape, dtype=float)

    @cached_property
    def circumradius(self) -> float:
        """Radius of the smallest origin-centered disc covering the robot footprint."""
        if self.is_disc:
            return self.robot_radius
        return float(np.sqrt((self._shape_arr**2).sum(axis=1)).max())

    # -- batched free-space predicates -------------------------------------

    def disc_centers_free(self, centers: np.ndarray) -> np.ndarray:
        """Validity of disc placements for an (N, 2) array of centers."""
        ok = points_in_polygon(centers, self._boundary_arr)
        for obs in self._obstacle_arrs:
            ok &= ~points_in_polygon(centers, obs)
        seg_a, seg_b = self._all_edges
        ok &= min_distance_to_segments(centers, seg_a, seg_b) > self.robot_radius
        return ok

    def transformed_shapes(self, positions: np.ndarray, thetas: np.ndarray) -> np.ndarray:
        """Robot polygons for (N, 2) positions and (N,) headings -> (N, V, 2)."""
        shape = self._shape_arr
        c, s = np.cos(thetas), np.sin(thetas)
        rot = np.stack([np.stack([c, -s], axis=-1), np.stack([s, c], axis=-1)], axis=-2)
        return np.einsum("nij,vj->nvi", rot, shape) + positions[:, None, :]

    def polygon_poses_free(self, positions: np.ndarray, thetas: np.ndarray) -> np.ndarray:
        """Validity of polygon-robot placements, vectorized over N poses."""
        polys = self.transformed_shapes(positions, thetas)
        n, v, _ = polys.shape
        verts = polys.reshape(n * v, 2)
        ok = points_in_polygon(verts, self._boundary_arr).reshape(n, v).all(axis=1)
        for obs in self._obstacle_arrs:
            ok &= ~points_in_polygon(verts, obs).reshape(n, v).any(axis=1)
        seg_a, seg_b = self._all_edges
        e1 = polys.reshape(-1, 2)
        e2 = np.roll(polys, -1, axis=1).reshape(-1, 2)
        hits = segments_intersect_batch(e1, e2, seg_a, seg_b).any(axis=1).reshape(n, v)
        ok &= ~hits.any(axis=1)
        # obstacle corners buried inside the robot footprint (no edge crossing)
        for obs in self._obstacle_arrs:
            ok &= ~points_in_polygons_batch(obs, polys).any(axis=1)
        return ok

    def poses_free(self, poses: np.ndarray) -> np.ndarray:
        """Validity of single-robot poses given as an (N, 3) array."""
        if self.is_disc:
            return self.disc_centers_free(poses[:, :2])
        return self.polygon_poses_free(poses[:, :2], poses[:, 2])


# ---------------------------------------------------------------------------
# predicates of the joint configuration space


def robot_free(w: Workspace, p: Pose) -> bool:
    """True iff one robot placed at p lies strictly inside the free workspace."""
    arr = np.array([[p.x, p.y, p.theta]], dtype=float)
    if not np.isfinite(arr).all():
        return False
    return bool(w.poses_free(arr)[0])


def pair_free(w: Workspace, p: Pose, q: Pose) -> bool:
    """True iff two robot footprints at p and q are disjoint (tangency collides)."""
    if w.is_disc:
        d2 = (p.x - q.x) ** 2 + (p.y - q.y) ** 2
        return d2 > (2.0 * w.robot_radius) ** 2
    polys = w.transformed_shapes(
        np.array([[p.x, p.y], [q.x, q.y]]), np.array([p.theta, q.theta])
    )
    return polygons_disjoint(polys[0], polys[1])


def joint_free(w: Workspace, U: JointConfig) -> bool:
    """True iff every robot is free and every robot pair is disjoint."""
    arr = config_array(U)
    if not np.isfinite(arr).all():
        return False
    if not w.poses_free(arr).all():
        return False
    m = len(U)
    if w.is_disc:
        lim = (2.0 * w.robot_radius) ** 2
        for i in range(m):
            xi, yi = U[i].x, U[i].y
            for j in range(i + 1, m):
                dx = xi - U[j].x
                dy = yi - U[j].y
                if dx * dx + dy * dy <= lim:
                    return False
        return True
    polys = w.transformed_shapes(arr[:, :2], arr[:, 2])
    for i in range(m):
        for j in range(i + 1, m):
            if not polygons_disjoint(polys[i], polys[j]):
                return False
    return True


def interpolate(a: JointConfig, b: JointConfig, t: float) -> JointConfig:
    """Per-robot linear interpolation; headings follow the shortest angular arc."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"interpolation parameter {t} outside [0, 1]")
    if len(a) != len(b):
        raise ValueError("configurations must have the same robot count")
    poses = []
    for pa, pb in zip(a, b):
        dth = normalize_angle(pb.theta - pa.theta)
        poses.append(
            Pose(
                pa.x + t * (pb.x - pa.x),
                pa.y + t * (pb.y - pa.y),
                normalize_angle(pa.theta + t * dth),
            )
        )
    return tuple(poses)


def _pair_indices(m: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = _PAIR_CACHE.get(m)
    if pairs is None:
        pairs = np.triu_indices(m, 1)
        _PAIR_CACHE[m] = pairs
    return pairs


_PAIR_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def motion_free(w: Workspace, arr_a: np.ndarray, arr_b: np.ndarray, resolution: float) -> bool:
    """Validity of the straight-line joint motion between two (m, 3) pose arrays.

    Endpoints are canonicalized by byte order so the verdict is symmetric; the
    step count is the smallest power of two with per-robot spacing at most
    `resolution`, so halving the resolution reuses every sample point and the
    check is refinement-monotone.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if arr_b.tobytes() < arr_a.tobytes():
        arr_a, arr_b = arr_b, arr_a
    m = arr_a.shape[0]

    delta = arr_b[:, :2] - arr_a[:, :2]
    dth = arr_b[:, 2] - arr_a[:, 2]
    dth = np.mod(dth + math.pi, TWO_PI) - math.pi
    disp = np.sqrt((delta * delta).sum(axis=1))
    if not w.is_disc:
        disp = disp + w.circumradius * np.abs(dth)
    max_disp = float(disp.max())
    if max_disp == 0.0:
        n = 1
    else:
        n = 1 << max(0, math.ceil(math.log2(math.ceil(max_disp / resolution))))
    ts = np.linspace(0.0, 1.0, n + 1)

    positions = arr_a[None, :, :2] + ts[:, None, None] * delta[None, :, :]
    if w.is_disc:
        iu, ju = _pair_indices(m)
        if m > 1:
            diff = positions[:, iu, :] - positions[:, ju, :]
            d2 = np.einsum("kpj,kpj->kp", diff, diff)
            if (d2 <= (2.0 * w.robot_radius) ** 2).any():
                return False
        return bool(w.disc_centers_free(positions.reshape(-1, 2)).all())

    thetas = arr_a[None, :, 2] + ts[:, None] * dth[None, :]
    flat_pos = positions.reshape(-1, 2)
    flat_th = thetas.reshape(-1)
    polys = w.transformed_shapes(flat_pos, flat_th).reshape(n + 1, m, -1, 2)
    for i in range(m):
        for j in range(i + 1, m):
            if not polygons_disjoint_paired(polys[:, i], polys[:, j]).all():
                return False
    return bool(w.polygon_poses_free(flat_pos, flat_th).all())


def edge_free(w: Workspace, s: Segment, resolution: float) -> bool:
    """Discretized straight-line local planner.

    Samples the joint motion densely enough that no robot moves more than
    `resolution` between consecutive checks, endpoints included.
    """
    return motion_free(w, config_array(s.a), config_array(s.b), resolution)
