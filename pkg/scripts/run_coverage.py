#!/usr/bin/env python3
"""Explored-equivalence-class experiment on a substructure scenario.

Grows a planner tree per metric and repetition and summarizes how many
distinct equivalence classes the vertices visit.
"""

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import numpy as np

from mrmp.cli import main as mrmp_main
from mrmp.scenarios import bundled_scenario_path


def run(scenario: str, tree_size: int, reps: int, seed: int, workers: int, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    code = mrmp_main([
        "ec-coverage",
        "--scenario", str(bundled_scenario_path(scenario)),
        "--tree-size", str(tree_size),
        "--reps", str(reps),
        "--seed", str(seed),
        "--workers", str(workers),
        "--out", str(out),
    ])
    if code != 0:
        raise SystemExit(code)
    counts = defaultdict(list)
    with open(out) as fh:
        for row in csv.DictReader(fh):
            counts[row["metric"]].append(int(row["distinct_ec"]))
    print(f"\ndistinct explored classes, {scenario}, N={tree_size}, {reps} repetitions:")
    for metric, values in counts.items():
        q1, med, q3 = np.percentile(values, [25, 50, 75])
        print(f"  {metric:8s} median={med:6.1f}  IQR=[{q1:.1f}, {q3:.1f}]")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="tunnel")
    ap.add_argument("--tree-size", type=int, default=2000)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=100)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--out", type=Path, default=Path("results/coverage.csv"))
    args = ap.parse_args()
    run(args.scenario, args.tree_size, args.reps, args.seed, args.workers, args.out)
