#!/usr/bin/env python3
"""Reproduce the per-scenario metric-separation table.

Runs the gamma command for the three substructure scenarios at their
calibrated thresholds and prints the resulting values side by side.
"""

import argparse
import csv
import sys
from pathlib import Path

from mrmp.cli import main as mrmp_main
from mrmp.scenarios import bundled_scenario_path

SCENARIOS = {"tunnel": 4, "chambers": 1, "puzzle": 7}


def run(outdir: Path, samples: int, seed: int) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    table = {}
    for name, tau in SCENARIOS.items():
        out = outdir / f"gamma_{name}.csv"
        code = mrmp_main([
            "gamma",
            "--scenario", str(bundled_scenario_path(name)),
            "--tau", str(tau),
            "--samples", str(samples),
            "--seed", str(seed),
            "--out", str(out),
        ])
        if code != 0:
            sys.exit(code)
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        table[name] = {r["metric"]: float(r["gamma"]) for r in rows}
    metrics = ["sum_l2", "max_l2", "eps2", "epsinf", "ctd"]
    print(f"\n{'scenario':10s} tau " + " ".join(f"{m:>8s}" for m in metrics))
    for name, tau in SCENARIOS.items():
        print(f"{name:10s} {tau:3d} " + " ".join(f"{table[name][m]:8.3f}" for m in metrics))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results/table1"))
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    run(args.out, args.samples, args.seed)
