#!/usr/bin/env python3
"""Rotation-weight sweep on the L-shaped-robot scene.

Runs the planner for each weight s and prints the per-s medians, highlighting
the most effective weight.
"""

import argparse
import csv
from pathlib import Path

from mrmp.cli import main as mrmp_main
from mrmp.scenarios import bundled_scenario_path


def run(metric: str, reps: int, seed: int, workers: int, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    code = mrmp_main([
        "sweep-s",
        "--scenario", str(bundled_scenario_path("lgrid")),
        "--metric", metric,
        "--reps", str(reps),
        "--seed", str(seed),
        "--workers", str(workers),
        "--out", str(out),
    ])
    if code != 0:
        raise SystemExit(code)
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    print(f"\n{metric} on the rotating-L scene ({reps} repetitions per s):")
    best = None
    for row in rows:
        med = row["median"]
        print(f"  s={row['s']:>4s} success={row['success_rate']:>5s} median={med or '-'}")
        if med and (best is None or float(med) < best[1]):
            best = (row["s"], float(med))
    if best:
        print(f"best weight: s={best[0]} (median {best[1]:.0f} vertices)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--metric", default="eps2")
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--out", type=Path, default=Path("results/sweep_s.csv"))
    args = ap.parse_args()
    run(args.metric, args.reps, args.seed, args.workers, args.out)
