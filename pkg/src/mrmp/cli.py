"""Command-line surface: plan, gamma, ec-coverage, sweep-s.

Every command takes --seed and produces byte-identical outputs when re-run
with the same arguments. Exit codes: 0 success (plan: solved), 2 plan
exhausted, 3 input error, 4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from .analysis import (
    AnalysisError,
    build_distributions_multi,
    gamma,
    natural_metric_distributions,
    run_ec_coverage,
    run_experiment,
)
from .metrics import ALL_KINDS, Metric, parse_metric
from .planner import solve, trace_lines
from .scenarios import ScenarioError, load_scenario
from .substructures import ClassificationError, SamplingError

EXIT_SOLVED = 0
EXIT_EXHAUSTED = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4

DEFAULT_METRICS = ",".join(k.value for k in ALL_KINDS)


def _metric_list(spec: str, s: float) -> list[Metric]:
    return [parse_metric(part.strip(), s) for part in spec.split(",") if part.strip()]


def _planner_kwargs(args) -> dict:
    out = {}
    for name in ("roadmap_size", "roadmap_k", "max_vertices", "goal_bias", "resolution", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            out[name] = value
    return out


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def cmd_plan(args) -> int:
    scenario = load_scenario(args.scenario, robots=args.robots)
    if args.alternate:
        metrics = _metric_list(args.metrics, args.s)
    else:
        metrics = [parse_metric(args.metric, args.s)]
    cfg = scenario.planner_config(**_planner_kwargs(args))
    cfg = replace(cfg, metrics=tuple(metrics), alternate=args.alternate)
    result = solve(scenario, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "tree_trace.jsonl").write_text("\n".join(trace_lines(result)) + "\n")
    stats = {
        "scenario": scenario.name,
        "status": result.status,
        "tree_size": result.tree_size,
        "iterations": result.iterations,
        "seed": result.seed,
        "metrics": list(result.metric_labels),
        "alternate": cfg.alternate,
        "path_configs": len(result.path) if result.path else 0,
    }
    (out / "stats.json").write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n")
    if result.path is not None:
        (out / "path.json").write_text(
            json.dumps(
                [[[p.x, p.y, p.theta] for p in config] for config in result.path],
                sort_keys=True,
            )
            + "\n"
        )
    print(f"{scenario.name}: {result.status} tree_size={result.tree_size} seed={result.seed}")
    return EXIT_SOLVED if result.solved else EXIT_EXHAUSTED


def cmd_gamma(args) -> int:
    scenario = load_scenario(args.scenario, robots=args.robots)
    if scenario.substructure is None:
        raise ScenarioError("substructure", "gamma requires a substructure annotation")
    metrics = _metric_list(args.metrics, args.s)
    dists = build_distributions_multi(
        scenario.substructure,
        scenario.workspace,
        scenario.m,
        metrics,
        samples=args.samples,
        seed=args.seed,
        depth_cap=args.depth_cap,
    )
    rows = []
    for metric in metrics:
        d = dists[metric.label]
        g = gamma(d, args.tau, bootstrap_seed=args.seed, weighting=args.weighting)
        rows.append(
            [
                scenario.name,
                metric.kind.value,
                _fmt(metric.s),
                args.tau,
                args.samples,
                g.pair_count,
                _fmt(g.gamma),
                _fmt(g.ci_low),
                _fmt(g.ci_high),
            ]
        )
    if args.include_natural:
        base = dists[metrics[0].label]
        g = gamma(
            natural_metric_distributions(base),
            args.tau,
            bootstrap_seed=args.seed,
            weighting=args.weighting,
        )
        rows.append(
            [scenario.name, "d_k", _fmt(1.0), args.tau, args.samples, g.pair_count,
             _fmt(g.gamma), _fmt(g.ci_low), _fmt(g.ci_high)]
        )
    _write_csv(
        Path(args.out),
        ["scenario", "metric", "s", "tau", "samples", "pairs", "gamma", "ci_low", "ci_high"],
        rows,
    )
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_ec_coverage(args) -> int:
    scenario = load_scenario(args.scenario, robots=args.robots)
    if scenario.substructure is None:
        raise ScenarioError("substructure", "ec-coverage requires a substructure annotation")
    metrics = _metric_list(args.metrics, args.s)
    cfg = scenario.planner_config(**_planner_kwargs(args))
    rows_raw = run_ec_coverage(
        scenario,
        metrics,
        N=args.tree_size,
        repetitions=args.reps,
        seed=args.seed,
        cfg=cfg,
        workers=args.workers,
    )
    rows = [
        [scenario.name, label, rep, seed, args.tree_size, distinct]
        for (label, rep, seed, distinct) in rows_raw
    ]
    _write_csv(
        Path(args.out),
        ["scenario", "metric", "rep", "seed", "tree_size", "distinct_ec"],
        rows,
    )
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_sweep_s(args) -> int:
    scenario = load_scenario(args.scenario, robots=args.robots)
    s_values = [float(v) for v in args.s_values.split(",") if v.strip()]
    kind = parse_metric(args.metric).kind
    combos = [[Metric(kind, s)] for s in s_values]
    cfg = scenario.planner_config(**_planner_kwargs(args))
    summary = run_experiment(scenario, combos, args.reps, cfg, workers=args.workers)
    rows = []
    for s, combo in zip(s_values, combos):
        stats = summary.per_metric[combo[0].label]
        q = stats.quartiles
        rows.append(
            [
                scenario.name,
                kind.value,
                _fmt(s),
                args.reps,
                _fmt(stats.success_rate),
                _fmt(q[0]) if q else "",
                _fmt(q[1]) if q else "",
                _fmt(q[2]) if q else "",
            ]
        )
    _write_csv(
        Path(args.out),
        ["scenario", "metric", "s", "reps", "success_rate", "q1", "median", "q3"],
        rows,
    )
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrmp",
        description="Multi-robot motion-planning metrics: planner and analysis tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_workers=False):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--robots", type=int, default=None, help="use only the first M robots")
        p.add_argument("--s", type=float, default=1.0, help="translation/rotation weight")
        if with_workers:
            p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("plan", help="run the planner once and export path/trace/stats")
    common(p)
    p.add_argument("--metric", default="sum_l2")
    p.add_argument("--alternate", action="store_true", help="round-robin over --metrics")
    p.add_argument("--metrics", default=DEFAULT_METRICS, help="comma list used with --alternate")
    p.add_argument("--max-vertices", dest="max_vertices", type=int, default=None)
    p.add_argument("--roadmap-size", dest="roadmap_size", type=int, default=None)
    p.add_argument("--roadmap-k", dest="roadmap_k", type=int, default=None)
    p.add_argument("--goal-bias", dest="goal_bias", type=float, default=None)
    p.add_argument("--resolution", type=float, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("gamma", help="distribution-separation estimate per metric")
    common(p)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--metrics", default=DEFAULT_METRICS)
    p.add_argument("--weighting", choices=("pairs", "cells"), default="cells",
                   help="weight (alpha, beta) cells by pair count or uniformly")
    p.add_argument("--depth-cap", dest="depth_cap", type=int, default=None)
    p.add_argument("--include-natural", action="store_true",
                   help="add a debug row using the natural distance as the metric")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("ec-coverage", help="distinct explored ECs per metric and repetition")
    common(p, with_workers=True)
    p.add_argument("--tree-size", dest="tree_size", type=int, required=True)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--metrics", default=DEFAULT_METRICS)
    p.add_argument("--roadmap-size", dest="roadmap_size", type=int, default=None)
    p.add_argument("--roadmap-k", dest="roadmap_k", type=int, default=None)
    p.add_argument("--goal-bias", dest="goal_bias", type=float, default=None)
    p.add_argument("--resolution", type=float, default=None)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_ec_coverage)

    p = sub.add_parser("sweep-s", help="vertex-count quartiles per rotation weight s")
    common(p, with_workers=True)
    p.add_argument("--metric", required=True)
    p.add_argument("--s-values", dest="s_values", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--max-vertices", dest="max_vertices", type=int, default=None)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_sweep_s)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, AnalysisError, ClassificationError, SamplingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
