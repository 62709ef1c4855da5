"""Nearest-neighbor storage over joint configurations, keyed by a metric.

The baseline (and reference semantics) is an exhaustive linear scan; the scan
is vectorized, with an exact bound-and-prune shortcut for the enclosing-ball
metric. Ties are broken toward the smallest inserted id, so queries are fully
deterministic.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .enclosing import enclosing_radius_tuples
from .geometry import JointConfig, config_array
from .metrics import (
    Metric,
    MetricKind,
    _miniball_radius_2d,
    displacement_pairs,
    evaluate_pairs,
)


_PAIR_IDX: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pair_idx(m: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = _PAIR_IDX.get(m)
    if pairs is None:
        pairs = np.triu_indices(m, 1)
        _PAIR_IDX[m] = pairs
    return pairs


class NnStore:
    """Append-only store resolving nearest(0-argmin of eval(metric, item, query))."""

    def __init__(self, metric: Metric):
        self.metric = metric
        self._ids: list = []
        self._id_set: set = set()
        self._configs: np.ndarray | None = None  # (capacity, m, 3)
        self._count = 0

    def __len__(self) -> int:
        return self._count

    def insert(self, U: JointConfig, item_id, arr: np.ndarray | None = None) -> None:
        if item_id in self._id_set:
            raise ValueError(f"duplicate id {item_id!r}")
        if arr is None:
            arr = config_array(U)
        if self._configs is None:
            self._configs = np.empty((16, arr.shape[0], 3))
        elif self._count == self._configs.shape[0]:
            grown = np.empty((2 * self._count, *self._configs.shape[1:]))
            grown[: self._count] = self._configs
            self._configs = grown
        if arr.shape[0] != self._configs.shape[1]:
            raise ValueError("robot count differs from stored items")
        self._configs[self._count] = arr
        self._count += 1
        self._ids.append(item_id)
        self._id_set.add(item_id)

    def _distances(self, Q: JointConfig) -> np.ndarray:
        items = self._configs[: self._count]
        query = np.broadcast_to(config_array(Q), items.shape)
        return evaluate_pairs(self.metric, items, query)

    def nearest(self, Q: JointConfig) -> tuple[object, float]:
        if self._count == 0:
            raise LookupError("nearest() on an empty store")
        if self.metric.kind is MetricKind.EPS2:
            values = self._eps2_scan(Q)
        else:
            values = self._distances(Q)
        best = values.min()
        ties = np.nonzero(values == best)[0]
        pos = min(ties, key=lambda i: self._ids[i])
        return self._ids[pos], float(values[pos])

    def _eps2_scan(self, Q: JointConfig) -> np.ndarray:
        """Exact eps2 distances, pruned by enclosing-ball radius bounds.

        Lower bound: half the largest pairwise displacement distance (the ball
        must cover both endpoints of the diameter). Upper bound: largest
        distance to the displacement centroid (that ball covers everything).
        Survivors are re-evaluated with the same enclosing-ball routine the
        scalar metric uses, so results match an unpruned scan exactly.
        """
        items = self._configs[: self._count]
        query = np.broadcast_to(config_array(Q), items.shape)
        disp = displacement_pairs(items, query, self.metric.s)
        n, m, _ = disp.shape
        planar = self.metric.s == 1.0 or bool((disp[..., 2] == 0.0).all())
        pts_nd = disp[..., :2] if planar else disp
        if m >= 2:
            iu, ju = _pair_idx(m)
            diff = pts_nd[:, iu, :] - pts_nd[:, ju, :]
            pair_d2 = np.einsum("npk,npk->np", diff, diff)
            far = pair_d2.argmax(axis=1)
            lb = 0.5 * np.sqrt(pair_d2[np.arange(n), far])
            # ball centered at the farthest pair's midpoint covers everything
            mids = 0.5 * (pts_nd[np.arange(n), iu[far], :] + pts_nd[np.arange(n), ju[far], :])
            mdiff = pts_nd - mids[:, None, :]
            ub = np.sqrt(np.einsum("nmk,nmk->nm", mdiff, mdiff).max(axis=1))
        else:
            lb = np.zeros(n)
            ub = np.zeros(n)
        survivors = np.nonzero(lb <= ub.min() * (1.0 + 1e-12) + 1e-30)[0]
        if planar and 2 <= m <= 8 and len(survivors) > 2:
            # the exact enumeration radius differs from the incremental one only
            # by rounding, so a hair of slack keeps every potential argmin
            approx = _miniball_radius_2d(pts_nd[survivors])
            keep = approx <= approx.min() * (1.0 + 1e-9) + 1e-12
            survivors = survivors[keep]
        values = np.full(self._count, np.inf)
        for i in survivors:
            if planar:
                pts = [tuple(p) for p in pts_nd[i].tolist()]
            else:
                row = disp[i]
                if (row[:, 2] == 0.0).all():
                    pts = [(x, y) for x, y, _ in row.tolist()]
                else:
                    pts = [tuple(p) for p in row.tolist()]
            values[i] = enclosing_radius_tuples(pts)
        return values


class AlternatingStore:
    """One NnStore per metric, queried round-robin across expansion attempts."""

    def __init__(self, metrics: Sequence[Metric]):
        if not metrics:
            raise ValueError("need at least one metric")
        self.stores = [NnStore(metric) for metric in metrics]
        self.cursor = 0

    def __len__(self) -> int:
        return len(self.stores[0])

    @property
    def metrics(self) -> list[Metric]:
        return [store.metric for store in self.stores]

    @property
    def active_metric(self) -> Metric:
        return self.stores[self.cursor].metric

    def insert(self, U: JointConfig, item_id, arr: np.ndarray | None = None) -> None:
        if item_id in self.stores[0]._id_set:
            raise ValueError(f"duplicate id {item_id!r}")
        if arr is None:
            arr = config_array(U)
        for store in self.stores:
            store.insert(U, item_id, arr=arr)

    def nearest(self, Q: JointConfig) -> tuple[object, float]:
        store = self.stores[self.cursor]
        self.cursor = (self.cursor + 1) % len(self.stores)
        return store.nearest(Q)
