"""Configuration-space substructures and their natural distance.

Three substructure kinds discretize the joint configuration space into
equivalence classes (ECs):

* permutations: robots ordered along the axes of narrow arms; only the robot
  at the junction-adjacent end of an arm can leave, entering another arm at
  its junction-adjacent end.
* partitions: robots assigned to the chamber with the largest footprint
  overlap; one robot at a time may move to an adjacent chamber.
* pebbles: like partitions on a cell grid, but with at most one robot per
  cell; a robot may move to an empty adjacent cell.

The natural distance between two configurations is the edge count of the
shortest path between their ECs on the implicit equivalence graph, computed by
BFS. Robot labels are interchangeable under every neighbor rule, so BFS runs
are canonicalized by relabeling; this collapses the number of distinct BFS
sources (for the 3x3 pebble grid, to the nine empty-cell positions) and keeps
the memo tables small.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import (
    JointConfig,
    Pose,
    Workspace,
    disc_polygon_intersection_area,
    rect_polygon,
)

Rect = tuple[float, float, float, float]  # x0, y0, x1, y1

PERMUTATIONS = "permutations"
PARTITIONS = "partitions"
PEBBLES = "pebbles"
KINDS = (PERMUTATIONS, PARTITIONS, PEBBLES)


class ClassificationError(ValueError):
    """A robot cannot be assigned to any region."""


class SamplingError(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""


@dataclass(frozen=True)
class Region:
    """Axis-aligned region; ordering fields are used by the permutations kind."""

    rect: Rect
    order_axis: str = "x"
    order_descending: bool = False

    def __post_init__(self) -> None:
        x0, y0, x1, y1 = self.rect
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate region rect {self.rect}")
        if self.order_axis not in ("x", "y"):
            raise ValueError(f"order_axis must be 'x' or 'y', got {self.order_axis!r}")

    @property
    def area(self) -> float:
        x0, y0, x1, y1 = self.rect
        return (x1 - x0) * (y1 - y0)

    def contains(self, x: float, y: float) -> bool:
        x0, y0, x1, y1 = self.rect
        return x0 <= x <= x1 and y0 <= y <= y1


def _rects_adjacent(a: Rect, b: Rect, tol: float = 1e-9) -> bool:
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b
    if abs(ax1 - bx0) <= tol or abs(bx1 - ax0) <= tol:
        return min(ay1, by1) - max(ay0, by0) > tol
    if abs(ay1 - by0) <= tol or abs(by1 - ay0) <= tol:
        return min(ax1, bx1) - max(ax0, bx0) > tol
    return False


@dataclass(eq=True)
class SubstructureSpec:
    """A substructure kind plus its regions and classification parameters."""

    kind: str
    regions: tuple[Region, ...]
    robot_radius: float = 1.0
    adjacency: tuple[tuple[int, int], ...] | None = None
    capacity: int | None = None
    _bfs_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown substructure kind {self.kind!r}")
        if not self.regions:
            raise ValueError("substructure needs at least one region")
        for i, a in enumerate(self.regions):
            for b in self.regions[i + 1 :]:
                ax0, ay0, ax1, ay1 = a.rect
                bx0, by0, bx1, by1 = b.rect
                if min(ax1, bx1) - max(ax0, bx0) > 1e-9 and min(ay1, by1) - max(ay0, by0) > 1e-9:
                    raise ValueError("region rects must be pairwise interior-disjoint")

    @property
    def region_count(self) -> int:
        return len(self.regions)

    def neighbor_regions(self, idx: int) -> tuple[int, ...]:
        """Region adjacency for partitions/pebbles moves (derived geometrically
        from shared rectangle edges unless given explicitly)."""
        if self.adjacency is not None:
            pairs = self.adjacency
        else:
            pairs = tuple(
                (i, j)
                for i in range(self.region_count)
                for j in range(i + 1, self.region_count)
                if _rects_adjacent(self.regions[i].rect, self.regions[j].rect)
            )
            self.adjacency = pairs
        out = []
        for i, j in pairs:
            if i == idx:
                out.append(j)
            elif j == idx:
                out.append(i)
        return tuple(sorted(out))


# ECKey encodings, robots numbered from 0:
#   permutations: tuple of per-region robot tuples, deep end first
#   partitions:   tuple of per-region sorted robot tuples
#   pebbles:      tuple over cells of robot index or None
ECKey = tuple


# ---------------------------------------------------------------------------
# classification


def _intersection_areas(spec: SubstructureSpec, pose: Pose) -> list[float]:
    r = spec.robot_radius
    areas = []
    for region in spec.regions:
        x0, y0, x1, y1 = region.rect
        if pose.x + r <= x0 or pose.x - r >= x1 or pose.y + r <= y0 or pose.y - r >= y1:
            areas.append(0.0)
        else:
            areas.append(
                disc_polygon_intersection_area(pose.x, pose.y, r, rect_polygon(x0, y0, x1, y1))
            )
    return areas


def _classify_permutations(spec: SubstructureSpec, U: JointConfig) -> ECKey:
    assignment: list[list[int]] = [[] for _ in spec.regions]
    for i, pose in enumerate(U):
        for ridx, region in enumerate(spec.regions):
            if region.contains(pose.x, pose.y):
                assignment[ridx].append(i)
                break
        else:
            raise ClassificationError(f"robot {i} at ({pose.x:g}, {pose.y:g}) lies in no region")
    key = []
    for ridx, robots in enumerate(assignment):
        region = spec.regions[ridx]
        coord = (lambda i: U[i].x) if region.order_axis == "x" else (lambda i: U[i].y)
        sign = -1.0 if region.order_descending else 1.0
        robots.sort(key=lambda i: (sign * coord(i), i))
        key.append(tuple(robots))
    return tuple(key)


def _argmax_with_ties(values: Sequence[float], rng: random.Random) -> int:
    best = max(values)
    ties = [i for i, v in enumerate(values) if v >= best * (1.0 - 1e-12)]
    if len(ties) == 1:
        return ties[0]
    return rng.choice(ties)


def _classify_partitions(spec: SubstructureSpec, U: JointConfig, rng: random.Random) -> ECKey:
    groups: list[list[int]] = [[] for _ in spec.regions]
    for i, pose in enumerate(U):
        areas = _intersection_areas(spec, pose)
        if max(areas) <= 0.0:
            raise ClassificationError(f"robot {i} has no overlap with any chamber")
        groups[_argmax_with_ties(areas, rng)].append(i)
    return tuple(tuple(sorted(g)) for g in groups)


def _classify_pebbles(spec: SubstructureSpec, U: JointConfig, rng: random.Random) -> ECKey:
    m = len(U)
    options: list[list[tuple[float, float, int]]] = []
    candidates: list[tuple[float, float, int, int]] = []
    for i, pose in enumerate(U):
        areas = _intersection_areas(spec, pose)
        if max(areas) <= 0.0:
            raise ClassificationError(f"robot {i} has no overlap with any cell")
        rows = [(-area, rng.random(), cell) for cell, area in enumerate(areas) if area > 0.0]
        rows.sort()
        options.append(rows)
        candidates.extend((a, t, i, cell) for a, t, cell in rows)
    candidates.sort()
    cells: list[int | None] = [None] * spec.region_count
    assigned = [False] * m
    for _, _, i, cell in candidates:
        if assigned[i] or cells[cell] is not None:
            continue
        cells[cell] = i
        assigned[i] = True

    def augment(robot: int, visited: set[int]) -> bool:
        # displace holders along preference-ordered alternating paths
        for _, _, cell in options[robot]:
            if cell in visited:
                continue
            visited.add(cell)
            holder = cells[cell]
            if holder is None or augment(holder, visited):
                cells[cell] = robot
                return True
        return False

    for i in range(m):
        if not assigned[i]:
            if not augment(i, set()):
                raise ClassificationError(f"robot {i} could not be assigned an empty cell")
            assigned[i] = True
    return tuple(cells)


def classify(spec: SubstructureSpec, U: JointConfig, rng: random.Random) -> ECKey:
    """Equivalence class of a joint configuration; rng resolves area ties."""
    if spec.kind == PERMUTATIONS:
        return _classify_permutations(spec, U)
    if spec.kind == PARTITIONS:
        return _classify_partitions(spec, U, rng)
    return _classify_pebbles(spec, U, rng)


# ---------------------------------------------------------------------------
# equivalence graph


def neighbors(spec: SubstructureSpec, key: ECKey) -> list[ECKey]:
    """ECs reachable by a single robot transition, in deterministic order."""
    out: list[ECKey] = []
    if spec.kind == PERMUTATIONS:
        for a, arm in enumerate(key):
            if not arm:
                continue
            robot = arm[-1]
            for b in range(len(key)):
                if b == a:
                    continue
                new = list(key)
                new[a] = arm[:-1]
                new[b] = key[b] + (robot,)
                out.append(tuple(new))
        return out
    if spec.kind == PARTITIONS:
        cap = spec.capacity
        for a, group in enumerate(key):
            for robot in group:
                for b in spec.neighbor_regions(a):
                    if cap is not None and len(key[b]) >= cap:
                        continue
                    new = list(key)
                    new[a] = tuple(r for r in group if r != robot)
                    new[b] = tuple(sorted(key[b] + (robot,)))
                    out.append(tuple(new))
        return out
    for cell, robot in enumerate(key):
        if robot is None:
            continue
        for target in spec.neighbor_regions(cell):
            if key[target] is None:
                new = list(key)
                new[cell] = None
                new[target] = robot
                out.append(tuple(new))
    return out


def _scan_order(spec: SubstructureSpec, key: ECKey) -> list[int]:
    if spec.kind == PEBBLES:
        return [r for r in key if r is not None]
    return [r for group in key for r in group]


def relabel_key(spec: SubstructureSpec, key: ECKey, mapping: dict[int, int]) -> ECKey | None:
    """Apply a robot relabeling; None if the key names robots outside the map."""
    if spec.kind == PEBBLES:
        out = []
        for r in key:
            if r is None:
                out.append(None)
            elif r in mapping:
                out.append(mapping[r])
            else:
                return None
        return tuple(out)
    if spec.kind == PERMUTATIONS:
        groups = []
        for group in key:
            row = []
            for r in group:
                if r not in mapping:
                    return None
                row.append(mapping[r])
            groups.append(tuple(row))
        return tuple(groups)
    groups = []
    for group in key:
        row = []
        for r in group:
            if r not in mapping:
                return None
            row.append(mapping[r])
        groups.append(tuple(sorted(row)))
    return tuple(groups)


def canonical_map(spec: SubstructureSpec, key: ECKey) -> dict[int, int]:
    """Relabeling that sends this key to its canonical representative."""
    return {r: i for i, r in enumerate(_scan_order(spec, key))}


def _bfs(spec: SubstructureSpec, source: ECKey, depth_cap: int | None) -> dict[ECKey, int]:
    dist = {source: 0}
    frontier = deque([source])
    while frontier:
        key = frontier.popleft()
        d = dist[key]
        if depth_cap is not None and d >= depth_cap:
            continue
        for nxt in neighbors(spec, key):
            if nxt not in dist:
                dist[nxt] = d + 1
                frontier.append(nxt)
    return dist


def bfs_distances(spec: SubstructureSpec, source: ECKey, depth_cap: int | None = None) -> dict[ECKey, int]:
    """Memoized BFS layers from a canonicalized source key."""
    mapping = canonical_map(spec, source)
    canon = relabel_key(spec, source, mapping)
    cache_key = (canon, depth_cap)
    table = spec._bfs_cache.get(cache_key)
    if table is None:
        table = _bfs(spec, canon, depth_cap)
        spec._bfs_cache[cache_key] = table
    return table


def natural_distance(
    spec: SubstructureSpec, a: ECKey, b: ECKey, depth_cap: int | None = 12
) -> int | None:
    """BFS edge distance between two ECs; None when unreachable (within the cap)."""
    if a == b:
        return 0
    mapping = canonical_map(spec, a)
    b_rel = relabel_key(spec, b, mapping)
    if b_rel is None:
        raise ValueError("keys name different robot sets")
    return bfs_distances(spec, a, depth_cap).get(b_rel)


def reachable_keys(spec: SubstructureSpec, start: ECKey, depth_cap: int | None = None) -> dict[ECKey, int]:
    """All ECs reachable from a start key (no canonicalization), with distances."""
    return _bfs(spec, start, depth_cap)


# ---------------------------------------------------------------------------
# sampling


def sample_configurations(
    spec: SubstructureSpec,
    w: Workspace,
    m: int,
    count: int,
    rng: np.random.Generator,
    max_batches: int = 20_000,
) -> list[JointConfig]:
    """Uniform rejection sampling of m-robot configurations within the regions.

    Robot placements are drawn uniformly over the region union, filtered to the
    collision-free set in bulk, grouped m at a time, and the group is rejected
    whenever any robot pair overlaps or the group cannot be classified (for
    pebbles, a handful of valid configurations admit no injective cell
    assignment); accepted groups are uniform over the classifiable valid set.
    Robots carry heading 0 (substructure scenarios are translation-only).
    """
    if not w.is_disc:
        raise ValueError("substructure sampling supports disc robots only")
    rects = np.array([r.rect for r in spec.regions])
    areas = np.array([r.area for r in spec.regions])
    weights = areas / areas.sum()
    lim = (2.0 * w.robot_radius) ** 2
    iu, ju = np.triu_indices(m, 1)
    tie_rng = random.Random(int(rng.integers(2**62)))

    out: list[JointConfig] = []
    pool = np.empty((0, 2))
    batch = max(512, 4 * m)
    for _ in range(max_batches):
        if len(out) >= count:
            return out
        ridx = rng.choice(len(rects), size=batch, p=weights)
        u = rng.random((batch, 2))
        lo = rects[ridx, 0:2]
        hi = rects[ridx, 2:4]
        pts = lo + u * (hi - lo)
        pts = pts[w.disc_centers_free(pts)]
        pool = np.concatenate([pool, pts]) if len(pool) else pts
        groups = len(pool) // m
        if groups == 0:
            continue
        cand = pool[: groups * m].reshape(groups, m, 2)
        pool = pool[groups * m :]
        if m > 1:
            diff = cand[:, iu, :] - cand[:, ju, :]
            ok = (np.einsum("gpk,gpk->gp", diff, diff) > lim).all(axis=1)
        else:
            ok = np.ones(groups, dtype=bool)
        for g in np.nonzero(ok)[0]:
            if len(out) >= count:
                break
            config = tuple(Pose(float(x), float(y), 0.0) for x, y in cand[g])
            try:
                classify(spec, config, tie_rng)
            except ClassificationError:
                continue
            out.append(config)
    if len(out) >= count:
        return out
    raise SamplingError(
        f"sampled only {len(out)}/{count} configurations in {max_batches} batches"
    )


def sample_configuration(
    spec: SubstructureSpec,
    w: Workspace,
    m: int,
    rng: np.random.Generator,
) -> JointConfig:
    """Single uniform collision-free configuration within the regions."""
    return sample_configurations(spec, w, m, 1, rng)[0]
