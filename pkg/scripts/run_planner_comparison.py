#!/usr/bin/env python3
"""Planner effectiveness comparison: success rate and vertices-to-solution.

Repeats seeded planner runs per metric (optionally including round-robin
combinations) and prints success rates with vertex-count quartiles.
"""

import argparse

from mrmp.analysis import run_experiment
from mrmp.metrics import ALL_KINDS, parse_metric
from mrmp.scenarios import load_bundled


def run(scenario: str, robots, metrics, pairs: bool, reps: int, seed: int,
        max_vertices: int, workers: int) -> None:
    sc = load_bundled(scenario, robots=robots)
    combos = [[m] for m in metrics]
    if pairs:
        combos += [
            [metrics[i], metrics[j]]
            for i in range(len(metrics))
            for j in range(i + 1, len(metrics))
        ]
    cfg = sc.planner_config(seed=seed, max_vertices=max_vertices)
    summary = run_experiment(sc, combos, reps, cfg, workers=workers)
    print(f"\n{scenario} (m={sc.m}), {reps} repetitions, budget {max_vertices} vertices:")
    for label, stats in summary.per_metric.items():
        q = stats.quartiles
        med = f"{q[1]:8.0f}" if q else "       -"
        print(f"  {label:16s} success={stats.success_rate:5.2f} median-vertices={med}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="tunnel")
    ap.add_argument("--robots", type=int, default=4)
    ap.add_argument("--metrics", default=",".join(k.value for k in ALL_KINDS))
    ap.add_argument("--pairs", action="store_true", help="also run all two-metric round-robins")
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=200)
    ap.add_argument("--max-vertices", type=int, default=20000)
    ap.add_argument("--workers", type=int, default=2)
    args = ap.parse_args()
    metrics = [parse_metric(k.strip()) for k in args.metrics.split(",") if k.strip()]
    run(args.scenario, args.robots, metrics, args.pairs, args.reps, args.seed,
        args.max_vertices, args.workers)
