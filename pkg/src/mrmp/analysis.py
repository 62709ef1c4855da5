"""Metric-quality analysis and experiment orchestration.

Two complementary tools:

* distribution separation: sample configurations inside a substructure, group
  the metric distances of all sample pairs by their natural distance alpha,
  and estimate the probability that the metric orders a pair at natural
  distance alpha below a pair at beta > alpha (restricted to alpha <= tau).
* explored equivalence classes: grow a planner tree to a fixed vertex budget
  and count how many distinct ECs its vertices visit.

Plus a repetition harness that aggregates planner success rates and
vertex-count quartiles over seeded repetitions, optionally in parallel
(results are reduced in seed order, so worker count never changes output).
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .geometry import JointConfig, config_array
from .metrics import Metric, MetricKind, evaluate_pairs
from .planner import PlannerConfig, solve
from .substructures import (
    SubstructureSpec,
    bfs_distances,
    canonical_map,
    classify,
    relabel_key,
    sample_configurations,
)

GAMMA_PAIR_CHUNK = 3_000_000  # element budget per evaluate_pairs block


class AnalysisError(RuntimeError):
    pass


@dataclass
class DistanceDistributions:
    """Metric distances of sampled configuration pairs, grouped by natural distance."""

    metric: Metric
    sample_count: int
    by_alpha: dict[int, np.ndarray]  # alpha -> ascending metric distances
    discarded_pairs: int  # pairs whose ECs are mutually unreachable

    @property
    def pair_count(self) -> int:
        return sum(len(v) for v in self.by_alpha.values())


@dataclass
class GammaResult:
    gamma: float
    tau: int
    pair_count: int  # comparable (alpha, beta) combinations entering the estimate
    cells: dict[tuple[int, int], tuple[int, int]]  # (alpha, beta) -> (wins, total)
    ci_low: float
    ci_high: float


@dataclass
class EcCoverageResult:
    distinct_count: int
    tree_size: int
    first_discovery: dict[tuple, int]  # ECKey -> index of first tree vertex in it


@dataclass
class MetricRunStats:
    label: str
    seeds: list[int]
    statuses: list[str]
    vertices: list[int]  # tree size per repetition
    success_rate: float
    quartiles: tuple[float, float, float] | None  # over successful runs only


@dataclass
class ExperimentSummary:
    scenario: str
    repetitions: int
    base_seed: int
    per_metric: dict[str, MetricRunStats]


# ---------------------------------------------------------------------------
# distribution separation


def _sampled_keys(
    spec: SubstructureSpec, w, m: int, count: int, seed: int
) -> tuple[np.ndarray, np.ndarray, list[tuple]]:
    """Sample `count` configs; returns (configs (n,m,3), key index per config, keys)."""
    rng_np = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0xA1])))
    rng_py = random.Random(seed ^ 0x5EED5)
    drawn = sample_configurations(spec, w, m, count, rng_np)
    configs = np.empty((count, m, 3))
    key_ids: dict[tuple, int] = {}
    key_index = np.empty(count, dtype=np.int32)
    keys: list[tuple] = []
    for i, cfg in enumerate(drawn):
        configs[i] = config_array(cfg)
        key = classify(spec, cfg, rng_py)
        kid = key_ids.get(key)
        if kid is None:
            kid = len(keys)
            key_ids[key] = kid
            keys.append(key)
        key_index[i] = kid
    return configs, key_index, keys


def _alpha_matrix(
    spec: SubstructureSpec, keys: Sequence[tuple], depth_cap: int | None
) -> np.ndarray:
    """Pairwise natural distances between distinct keys; -1 where unreachable."""
    K = len(keys)
    alpha = np.full((K, K), -1, dtype=np.int32)
    np.fill_diagonal(alpha, 0)
    for i, key in enumerate(keys):
        table = bfs_distances(spec, key, depth_cap)
        mapping = canonical_map(spec, key)
        for j in range(i + 1, K):
            rel = relabel_key(spec, keys[j], mapping)
            d = table.get(rel)
            if d is not None:
                alpha[i, j] = d
                alpha[j, i] = d
    return alpha


def build_distributions_multi(
    spec: SubstructureSpec,
    w,
    m: int,
    metrics: Sequence[Metric],
    samples: int,
    seed: int,
    depth_cap: int | None = None,
) -> dict[str, DistanceDistributions]:
    """Distance distributions for several metrics over one shared sample set.

    depth_cap=None computes exact natural distances; the relabeling
    canonicalization in the substructure module keeps this cheap even on the
    pebble graph.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    configs, key_index, keys = _sampled_keys(spec, w, m, samples, seed)
    alpha_mat = _alpha_matrix(spec, keys, depth_cap)

    iu, ju = np.triu_indices(samples, 1)
    alphas = alpha_mat[key_index[iu], key_index[ju]]
    reachable = alphas >= 0
    discarded = int((~reachable).sum())
    iu, ju, alphas = iu[reachable], ju[reachable], alphas[reachable]

    order = np.argsort(alphas, kind="stable")
    iu, ju, alphas = iu[order], ju[order], alphas[order]
    levels, starts = np.unique(alphas, return_index=True)
    bounds = list(starts) + [len(alphas)]

    out: dict[str, DistanceDistributions] = {}
    for metric in metrics:
        if metric.kind is MetricKind.EPS2:
            # the enclosing-disc kernel materializes per-pair candidate arrays
            # (O(m^3) candidates x m coverage tests); budget chunks accordingly
            candidates = m * (m - 1) // 2 + m * (m - 1) * (m - 2) // 6
            chunk = max(1, GAMMA_PAIR_CHUNK // max(1, candidates * m))
        else:
            chunk = max(1, GAMMA_PAIR_CHUNK // max(1, m * 3))
        values = np.empty(len(alphas))
        for lo in range(0, len(alphas), chunk):
            hi = min(lo + chunk, len(alphas))
            values[lo:hi] = evaluate_pairs(metric, configs[iu[lo:hi]], configs[ju[lo:hi]])
        by_alpha = {
            int(levels[k]): np.sort(values[bounds[k] : bounds[k + 1]])
            for k in range(len(levels))
        }
        out[metric.label] = DistanceDistributions(
            metric=metric,
            sample_count=samples,
            by_alpha=by_alpha,
            discarded_pairs=discarded,
        )
    return out


def build_distributions(
    spec: SubstructureSpec,
    w,
    m: int,
    metric: Metric,
    samples: int,
    seed: int,
    depth_cap: int | None = None,
) -> DistanceDistributions:
    return build_distributions_multi(spec, w, m, [metric], samples, seed, depth_cap)[metric.label]


def natural_metric_distributions(dists: DistanceDistributions) -> DistanceDistributions:
    """Distributions of the natural distance itself (each cell is constant).

    Useful as a debugging reference: its separation probability is exactly 1.
    """
    by_alpha = {a: np.full(len(v), float(a)) for a, v in dists.by_alpha.items()}
    return replace(dists, by_alpha=by_alpha)


def gamma(
    dists: DistanceDistributions,
    tau: int,
    bootstrap: int = 1000,
    bootstrap_seed: int = 0,
    weighting: str = "pairs",
) -> GammaResult:
    """Probability that metric distances order natural distances correctly.

    Compares every pair (a0, b0) with a0 drawn from the alpha cell and b0 from
    the beta cell, over all alpha < beta with alpha <= tau; ties count as
    failures. With weighting="pairs" every comparison counts equally (cells
    weigh in by their pair counts); "cells" averages the per-cell win rates
    uniformly instead. The reference presentation does not pin the convention,
    so both are exposed.
    """
    if weighting not in ("pairs", "cells"):
        raise ValueError("weighting must be 'pairs' or 'cells'")
    levels = sorted(dists.by_alpha)
    cells: dict[tuple[int, int], tuple[int, int]] = {}
    for a in levels:
        if a > tau:
            break
        A = dists.by_alpha[a]
        for b in levels:
            if b <= a:
                continue
            B = dists.by_alpha[b]
            wins = int(np.searchsorted(A, B, side="left").sum())
            cells[(a, b)] = (wins, len(A) * len(B))
    if not cells:
        raise AnalysisError(
            f"no comparable distance pairs for tau={tau}; "
            f"natural-distance levels present: {levels}"
        )
    comps_total = sum(t for (_, t) in cells.values())
    if weighting == "pairs":
        point = sum(w for (w, _) in cells.values()) / comps_total
    else:
        point = float(np.mean([w / t for (w, t) in cells.values()]))

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([bootstrap_seed, 0xB007])))
    if bootstrap > 0:
        totals = np.array([t for (_, t) in cells.values()], dtype=np.int64)
        probs = np.array([w / t for (w, t) in cells.values()])
        draws = rng.binomial(totals[None, :], probs[None, :], size=(bootstrap, len(totals)))
        if weighting == "pairs":
            gam = draws.sum(axis=1) / totals.sum()
        else:
            gam = (draws / totals[None, :]).mean(axis=1)
        ci_low, ci_high = (float(q) for q in np.percentile(gam, [2.5, 97.5]))
    else:
        ci_low = ci_high = point
    return GammaResult(
        gamma=point,
        tau=tau,
        pair_count=comps_total,
        cells=cells,
        ci_low=ci_low,
        ci_high=ci_high,
    )


# ---------------------------------------------------------------------------
# explored equivalence classes


def ec_coverage(
    spec: SubstructureSpec,
    vertices: Sequence[JointConfig],
    N: int,
    rng: random.Random,
) -> EcCoverageResult:
    """Distinct ECs among the first N explored vertices, in discovery order."""
    if len(vertices) < N:
        raise ValueError(f"need at least {N} explored vertices, got {len(vertices)}")
    first: dict[tuple, int] = {}
    for idx in range(N):
        key = classify(spec, vertices[idx], rng)
        if key not in first:
            first[key] = idx
    return EcCoverageResult(distinct_count=len(first), tree_size=N, first_discovery=first)


# ---------------------------------------------------------------------------
# repetition harness


def _combo_label(combo: Sequence[Metric]) -> str:
    return "+".join(m.label for m in combo)


def _run_one(scenario_doc: dict, robots: int | None, cfg: PlannerConfig) -> tuple[str, int]:
    from .scenarios import scenario_from_dict

    scenario = scenario_from_dict(scenario_doc, robots=robots)
    result = solve(scenario, cfg)
    return result.status, result.tree_size


def _job(args):
    combo_idx, rep, scenario_doc, robots, cfg = args
    status, tree_size = _run_one(scenario_doc, robots, cfg)
    return combo_idx, rep, status, tree_size


def run_experiment(
    scenario,
    combos: Sequence[Sequence[Metric]],
    repetitions: int,
    cfg: PlannerConfig,
    workers: int = 1,
) -> ExperimentSummary:
    """Solve `repetitions` times per metric combination with seeds cfg.seed + j.

    Combinations of more than one metric alternate round-robin. Repetitions are
    independent; with workers > 1 they run in separate processes and are
    reduced in (combo, repetition) order, so the summary is identical to a
    sequential run.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    scenario_doc = scenario.to_dict()
    jobs = []
    for ci, combo in enumerate(combos):
        for rep in range(repetitions):
            run_cfg = replace(
                cfg,
                seed=cfg.seed + rep,
                metrics=tuple(combo),
                alternate=len(combo) > 1 or cfg.alternate,
            )
            jobs.append((ci, rep, scenario_doc, None, run_cfg))

    results: dict[tuple[int, int], tuple[str, int]] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for ci, rep, status, size in pool.map(_job, jobs, chunksize=1):
                results[(ci, rep)] = (status, size)
    else:
        for args in jobs:
            ci, rep, status, size = _job(args)
            results[(ci, rep)] = (status, size)

    per_metric: dict[str, MetricRunStats] = {}
    for ci, combo in enumerate(combos):
        label = _combo_label(combo)
        seeds = [cfg.seed + rep for rep in range(repetitions)]
        statuses = [results[(ci, rep)][0] for rep in range(repetitions)]
        vertices = [results[(ci, rep)][1] for rep in range(repetitions)]
        solved_sizes = [v for v, s in zip(vertices, statuses) if s == "solved"]
        quartiles = None
        if solved_sizes:
            q1, q2, q3 = np.percentile(solved_sizes, [25, 50, 75])
            quartiles = (float(q1), float(q2), float(q3))
        per_metric[label] = MetricRunStats(
            label=label,
            seeds=seeds,
            statuses=statuses,
            vertices=vertices,
            success_rate=statuses.count("solved") / repetitions,
            quartiles=quartiles,
        )
    return ExperimentSummary(
        scenario=scenario.name,
        repetitions=repetitions,
        base_seed=cfg.seed,
        per_metric=per_metric,
    )


def _coverage_job(args):
    metric_idx, rep, scenario_doc, N, cfg = args
    from .scenarios import scenario_from_dict

    scenario = scenario_from_dict(scenario_doc)
    result = solve(scenario, cfg)
    rng = random.Random(cfg.seed ^ 0xEC0)
    cov = ec_coverage(scenario.substructure, result.explored, N, rng)
    return metric_idx, rep, cov.distinct_count


def run_ec_coverage(
    scenario,
    metrics: Sequence[Metric],
    N: int,
    repetitions: int,
    seed: int,
    cfg: PlannerConfig | None = None,
    workers: int = 1,
) -> list[tuple[str, int, int, int]]:
    """Rows (metric label, repetition, seed, distinct EC count) for trees of N vertices."""
    if scenario.substructure is None:
        raise AnalysisError("scenario has no substructure annotation")
    base = cfg if cfg is not None else scenario.planner_config()
    scenario_doc = scenario.to_dict()
    jobs = []
    for mi, metric in enumerate(metrics):
        for rep in range(repetitions):
            run_cfg = replace(
                base,
                seed=seed + rep,
                metrics=(metric,),
                alternate=False,
                max_vertices=N,
                stop_at_goal=False,
                # exploration trees must actually reach N vertices; cluttered
                # scenes need many attempts per added vertex
                max_iterations=base.max_iterations or 50 * N,
            )
            jobs.append((mi, rep, scenario_doc, N, run_cfg))
    results: dict[tuple[int, int], int] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for mi, rep, distinct in pool.map(_coverage_job, jobs, chunksize=1):
                results[(mi, rep)] = distinct
    else:
        for args in jobs:
            mi, rep, distinct = _coverage_job(args)
            results[(mi, rep)] = distinct
    rows = []
    for mi, metric in enumerate(metrics):
        for rep in range(repetitions):
            rows.append((metric.label, rep, seed + rep, results[(mi, rep)]))
    return rows
