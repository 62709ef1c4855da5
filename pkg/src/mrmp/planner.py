"""dRRT-style tree planner over the implicit tensor product of per-robot roadmaps.

Each robot gets its own collision-free roadmap (uniform samples, k-nearest
connections, start and goal included as vertices). The joint planner grows a
tree whose vertices are tuples of roadmap vertices: a random joint target is
drawn, its nearest tree vertex under the active metric is found, and a
direction oracle steps every robot to its best roadmap neighbor toward the
target. The straight-line joint motion is validated before the vertex is
added, so every tree edge is collision-free by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import (
    JointConfig,
    Pose,
    Segment,
    Workspace,
    edge_free,
    joint_free,
    motion_free,
)
from .metrics import Metric, MetricKind
from .nn import AlternatingStore, NnStore


class RoadmapError(RuntimeError):
    """Roadmap construction could not connect a robot's start and goal."""


# bound on in-tree steps per expansion attempt; greedy walks cannot loop
# productively past this in the bundled scenarios
_WALK_CAP = 64


@dataclass(frozen=True)
class PlannerConfig:
    roadmap_size: int = 200
    roadmap_k: int = 8
    max_vertices: int = 10_000
    goal_bias: float = 0.05
    resolution: float | None = None  # None: robot_radius / 4
    seed: int = 0
    metrics: tuple[Metric, ...] = (Metric(MetricKind.SUM_L2),)
    alternate: bool = False
    max_iterations: int | None = None  # None: 5 * max_vertices
    stop_at_goal: bool = True
    roadmap_retries: int = 4

    def __post_init__(self) -> None:
        if self.roadmap_size < 2 or self.roadmap_k < 1 or self.max_vertices < 1:
            raise ValueError("roadmap_size, roadmap_k and max_vertices must be positive")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError("goal_bias must lie in [0, 1]")
        if not self.metrics:
            raise ValueError("at least one metric required")

    def effective_resolution(self, w: Workspace) -> float:
        return self.resolution if self.resolution is not None else w.robot_radius / 4.0

    def iteration_budget(self) -> int:
        return self.max_iterations if self.max_iterations is not None else 5 * self.max_vertices


@dataclass
class Roadmap:
    """Single-robot roadmap: pose table plus sorted adjacency lists."""

    poses: np.ndarray  # (n, 3)
    adjacency: tuple[tuple[int, ...], ...]
    start_index: int
    goal_index: int

    def pose(self, idx: int) -> Pose:
        x, y, th = self.poses[idx]
        return Pose(float(x), float(y), float(th))


@dataclass(frozen=True)
class TraceRecord:
    vertex: int
    parent: int | None
    attempt: int
    metric: str | None


@dataclass
class PlanResult:
    status: str  # "solved" | "exhausted"
    path: list[JointConfig] | None
    tree_size: int
    explored: list[JointConfig]
    seed: int
    iterations: int
    trace: list[TraceRecord]
    metric_labels: tuple[str, ...]

    @property
    def solved(self) -> bool:
        return self.status == "solved"


def _rng(*entropy: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(entropy))))


def build_roadmap(
    w: Workspace, robot_index: int, start: Pose, goal: Pose, cfg: PlannerConfig
) -> Roadmap:
    """Sample and connect a single robot's roadmap; start and goal are vertices."""
    resolution = cfg.effective_resolution(w)
    rotating = not w.is_disc
    x0, y0, x1, y1 = w.bbox
    same = start == goal
    base = [np.array([start.x, start.y, start.theta])]
    if not same:
        base.append(np.array([goal.x, goal.y, goal.theta]))
    goal_index = 0 if same else 1

    target = max(cfg.roadmap_size, len(base))
    for attempt in range(cfg.roadmap_retries + 1):
        rng = _rng(cfg.seed, 0x0AD, robot_index, attempt)
        poses = list(base)
        budget = 200 * target
        while len(poses) < target and budget > 0:
            n_try = min(max(target - len(poses), 16) * 2, 1024)
            cand = np.empty((n_try, 3))
            cand[:, 0] = rng.uniform(x0, x1, n_try)
            cand[:, 1] = rng.uniform(y0, y1, n_try)
            cand[:, 2] = rng.uniform(-math.pi, math.pi, n_try) if rotating else 0.0
            ok = w.poses_free(cand)
            for row in cand[ok]:
                poses.append(row)
                if len(poses) == target:
                    break
            budget -= n_try
        arr = np.array(poses)
        n = len(arr)
        d2 = ((arr[:, None, :2] - arr[None, :, :2]) ** 2).sum(axis=2)
        np.fill_diagonal(d2, np.inf)
        k = min(cfg.roadmap_k, n - 1)
        adj: list[set[int]] = [set() for _ in range(n)]
        if k > 0:
            knn = np.argsort(d2, axis=1)[:, :k]
            candidates = sorted(
                {(min(i, int(j)), max(i, int(j))) for i in range(n) for j in knn[i]}
            )
            for i, j in candidates:
                pi = Pose(float(arr[i, 0]), float(arr[i, 1]), float(arr[i, 2]))
                pj = Pose(float(arr[j, 0]), float(arr[j, 1]), float(arr[j, 2]))
                if edge_free(w, Segment((pi,), (pj,)), resolution):
                    adj[i].add(j)
                    adj[j].add(i)
        # connectivity between this robot's start and goal
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if goal_index in seen:
            return Roadmap(
                poses=arr,
                adjacency=tuple(tuple(sorted(s)) for s in adj),
                start_index=0,
                goal_index=goal_index,
            )
        target *= 2
    raise RoadmapError(
        f"could not connect start and goal of robot {robot_index} "
        f"after {cfg.roadmap_retries + 1} attempts"
    )


def oracle_step(
    components: tuple[int, ...], target: JointConfig, roadmaps: Sequence[Roadmap]
) -> tuple[int, ...]:
    """Per-robot greedy step: best roadmap neighbor (or stay) toward the target.

    The surrogate is the single-robot planar distance, ignoring heading; ties
    break toward the smaller roadmap vertex index.
    """
    out = []
    for i, comp in enumerate(components):
        rm = roadmaps[i]
        tx, ty = target[i].x, target[i].y
        cands = (comp, *rm.adjacency[comp])
        best = None
        best_d = math.inf
        for c in cands:
            px, py = rm.poses[c, 0], rm.poses[c, 1]
            d = (px - tx) ** 2 + (py - ty) ** 2
            if d < best_d or (d == best_d and (best is None or c < best)):
                best = c
                best_d = d
        out.append(best)
    return tuple(out)


class _Tree:
    def __init__(self, root_comp: tuple[int, ...], root_config: JointConfig):
        self.components: list[tuple[int, ...]] = [root_comp]
        self.parents: list[int | None] = [None]
        self.configs: list[JointConfig] = [root_config]
        self.arrays: list[np.ndarray] = [np.asarray(root_config, dtype=float)]
        self.index: dict[tuple[int, ...], int] = {root_comp: 0}
        self.blocked: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()

    def __len__(self) -> int:
        return len(self.components)

    def add(self, comp: tuple[int, ...], config: JointConfig, arr: np.ndarray, parent: int) -> int:
        new_id = len(self.components)
        self.components.append(comp)
        self.parents.append(parent)
        self.configs.append(config)
        self.arrays.append(arr)
        self.index[comp] = new_id
        return new_id


def _joint_pose(roadmaps: Sequence[Roadmap], comp: tuple[int, ...]) -> JointConfig:
    return tuple(rm.pose(c) for rm, c in zip(roadmaps, comp))


def expand(
    tree: _Tree,
    w: Workspace,
    roadmaps: Sequence[Roadmap],
    store: NnStore | AlternatingStore,
    rng: np.random.Generator,
    goal: JointConfig,
    cfg: PlannerConfig,
    resolution: float,
    goal_steps: dict | None = None,
) -> tuple[str, int | None, str]:
    """One expansion attempt; returns (outcome, new_vertex_id, active_metric_label)."""
    rotating = not w.is_disc
    x0, y0, x1, y1 = w.bbox
    if rng.random() < cfg.goal_bias:
        q_rand = goal
        toward_goal = True
    else:
        m = len(goal)
        xs = rng.uniform(x0, x1, m)
        ys = rng.uniform(y0, y1, m)
        ths = rng.uniform(-math.pi, math.pi, m) if rotating else np.zeros(m)
        q_rand = tuple(Pose(float(a), float(b), float(c)) for a, b, c in zip(xs, ys, ths))
        toward_goal = False

    metric_label = (
        store.active_metric.label if isinstance(store, AlternatingStore) else store.metric.label
    )
    near_id, _ = store.nearest(q_rand)
    # greedy walk toward q_rand; segments already in the tree are traversed
    # without re-adding, so repeated draws of the same target (goal bias)
    # extend the frontier by one new vertex per attempt instead of stalling
    cur_id = near_id
    cur_comp = tree.components[near_id]
    for _ in range(_WALK_CAP):
        # roadmaps are static, so greedy steps toward the fixed goal can be
        # memoized; repeated goal-biased walks then cost dict lookups only
        if toward_goal and goal_steps is not None:
            new_comp = goal_steps.get(cur_comp)
            if new_comp is None:
                new_comp = oracle_step(cur_comp, q_rand, roadmaps)
                goal_steps[cur_comp] = new_comp
        else:
            new_comp = oracle_step(cur_comp, q_rand, roadmaps)
        if new_comp == cur_comp:
            return "duplicate", None, metric_label
        existing = tree.index.get(new_comp)
        if existing is not None:
            cur_id, cur_comp = existing, new_comp
            continue
        if (cur_comp, new_comp) in tree.blocked:
            return "blocked", None, metric_label
        new_arr = np.stack([roadmaps[i].poses[c] for i, c in enumerate(new_comp)])
        if not motion_free(w, tree.arrays[cur_id], new_arr, resolution):
            tree.blocked.add((cur_comp, new_comp))
            return "blocked", None, metric_label
        new_config = _joint_pose(roadmaps, new_comp)
        new_id = tree.add(new_comp, new_config, new_arr, cur_id)
        store.insert(new_config, new_id, arr=new_arr)
        return "added", new_id, metric_label
    return "duplicate", None, metric_label


def solve(scenario, cfg: PlannerConfig) -> PlanResult:
    """Plan from scenario start to goal; deterministic for a fixed seed."""
    w: Workspace = scenario.workspace
    start: JointConfig = scenario.start
    goal: JointConfig = scenario.goal
    if not joint_free(w, start):
        raise ValueError("start configuration is not collision-free")
    if not joint_free(w, goal):
        raise ValueError("goal configuration is not collision-free")

    resolution = cfg.effective_resolution(w)
    roadmaps = [
        build_roadmap(w, i, start[i], goal[i], cfg) for i in range(len(start))
    ]
    root_comp = tuple(rm.start_index for rm in roadmaps)
    goal_comp = tuple(rm.goal_index for rm in roadmaps)
    root_config = _joint_pose(roadmaps, root_comp)

    tree = _Tree(root_comp, root_config)
    if cfg.alternate or len(cfg.metrics) > 1:
        store: NnStore | AlternatingStore = AlternatingStore(cfg.metrics)
    else:
        store = NnStore(cfg.metrics[0])
    store.insert(root_config, 0)
    trace = [TraceRecord(vertex=0, parent=None, attempt=0, metric=None)]

    rng = _rng(cfg.seed, 0x7EE)
    iterations = 0
    budget = cfg.iteration_budget()
    goal_steps: dict = {}
    if root_comp != goal_comp:
        while len(tree) < cfg.max_vertices and iterations < budget:
            iterations += 1
            outcome, new_id, label = expand(
                tree, w, roadmaps, store, rng, goal, cfg, resolution, goal_steps
            )
            if outcome == "added":
                trace.append(
                    TraceRecord(
                        vertex=new_id,
                        parent=tree.parents[new_id],
                        attempt=iterations,
                        metric=label,
                    )
                )
                if cfg.stop_at_goal and tree.components[new_id] == goal_comp:
                    break

    goal_id = tree.index.get(goal_comp)
    if goal_id is not None:
        path_ids = []
        v: int | None = goal_id
        while v is not None:
            path_ids.append(v)
            v = tree.parents[v]
        path = [tree.configs[i] for i in reversed(path_ids)]
        status = "solved"
    else:
        path = None
        status = "exhausted"

    return PlanResult(
        status=status,
        path=path,
        tree_size=len(tree),
        explored=list(tree.configs),
        seed=cfg.seed,
        iterations=iterations,
        trace=trace,
        metric_labels=tuple(m.label for m in cfg.metrics),
    )


def trace_lines(result: PlanResult) -> list[str]:
    """Line-delimited trace records: vertex id, parent id, attempt, metric, poses."""
    lines = []
    for rec in result.trace:
        config = result.explored[rec.vertex]
        lines.append(
            json.dumps(
                {
                    "vertex": rec.vertex,
                    "parent": rec.parent,
                    "attempt": rec.attempt,
                    "metric": rec.metric,
                    "poses": [[p.x, p.y, p.theta] for p in config],
                },
                sort_keys=True,
            )
        )
    return lines
