import random

import numpy as np
import pytest

from mrmp.analysis import (
    AnalysisError,
    DistanceDistributions,
    build_distributions,
    build_distributions_multi,
    ec_coverage,
    gamma,
    natural_metric_distributions,
    run_ec_coverage,
    run_experiment,
)
from mrmp.geometry import joint_config
from mrmp.metrics import Metric, MetricKind
from mrmp.planner import PlannerConfig
from mrmp.scenarios import Scenario, load_bundled


def dists_from_cells(cells: dict[int, list[float]]) -> DistanceDistributions:
    return DistanceDistributions(
        metric=Metric(MetricKind.SUM_L2),
        sample_count=0,
        by_alpha={a: np.sort(np.asarray(v, dtype=float)) for a, v in cells.items()},
        discarded_pairs=0,
    )


class TestGamma:
    def test_natural_distance_is_perfect(self):
        d = dists_from_cells({0: [0, 0, 0], 1: [1, 1], 2: [2, 2, 2], 5: [5]})
        res = gamma(d, tau=2)
        assert res.gamma == 1.0
        assert res.ci_low == res.ci_high == 1.0

    def test_constant_metric_scores_zero(self):
        d = dists_from_cells({0: [0.0, 0.0], 1: [0.0, 0.0], 3: [0.0]})
        assert gamma(d, tau=1).gamma == 0.0

    def test_pair_weighting_counts_comparisons(self):
        # cell (0,1): 1x1 with a win; cell (0,2): 1x3 all losses
        d = dists_from_cells({0: [1.0], 1: [2.0], 2: [0.5, 0.5, 0.5]})
        res = gamma(d, tau=0)
        assert res.pair_count == 4
        assert res.gamma == pytest.approx(1 / 4)
        cell = gamma(d, tau=0, weighting="cells")
        assert cell.gamma == pytest.approx(0.5)  # mean of 1.0 and 0.0

    def test_ties_count_as_failures(self):
        d = dists_from_cells({0: [1.0], 1: [1.0]})
        assert gamma(d, tau=0).gamma == 0.0

    def test_tau_restricts_alpha_only(self):
        d = dists_from_cells({0: [0.0], 3: [1.0], 5: [2.0]})
        res = gamma(d, tau=0)
        # cells (0,3) and (0,5) count; (3,5) does not
        assert set(res.cells) == {(0, 3), (0, 5)}

    def test_no_cells_errors(self):
        d = dists_from_cells({7: [1.0, 2.0]})
        with pytest.raises(AnalysisError):
            gamma(d, tau=3)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(0)
        cells = {a: list(rng.uniform(0, 10, 30)) for a in range(5)}
        base = gamma(dists_from_cells(cells), tau=2, bootstrap=0).gamma
        squared = gamma(
            dists_from_cells({a: [v * v for v in vs] for a, vs in cells.items()}),
            tau=2,
            bootstrap=0,
        ).gamma
        assert base == squared

    def test_bootstrap_interval_brackets_point(self):
        rng = np.random.default_rng(1)
        cells = {a: list(rng.uniform(0, 4 + a, 40)) for a in range(4)}
        res = gamma(dists_from_cells(cells), tau=2, bootstrap=500)
        assert res.ci_low <= res.gamma <= res.ci_high


class TestBuildDistributions:
    def test_small_build(self, tunnel):
        d = build_distributions(
            tunnel.substructure, tunnel.workspace, 2, Metric(MetricKind.SUM_L2),
            samples=40, seed=3,
        )
        assert d.sample_count == 40
        assert d.pair_count + d.discarded_pairs == 40 * 39 // 2
        assert all((v >= 0).all() for v in d.by_alpha.values())
        assert all(a >= 0 for a in d.by_alpha)

    def test_multi_shares_samples(self, tunnel):
        ms = [Metric(MetricKind.SUM_L2), Metric(MetricKind.CTD)]
        out = build_distributions_multi(
            tunnel.substructure, tunnel.workspace, 2, ms, samples=30, seed=5
        )
        a = out["sum_l2"]
        b = out["ctd"]
        assert sorted(a.by_alpha) == sorted(b.by_alpha)
        assert all(len(a.by_alpha[k]) == len(b.by_alpha[k]) for k in a.by_alpha)

    def test_natural_metric_reference(self, tunnel):
        d = build_distributions(
            tunnel.substructure, tunnel.workspace, 2, Metric(MetricKind.SUM_L2),
            samples=30, seed=7,
        )
        nat = natural_metric_distributions(d)
        for a, vals in nat.by_alpha.items():
            assert (vals == a).all()
        assert gamma(nat, tau=4).gamma == 1.0


class TestEcCoverage:
    def test_single_vertex(self, tunnel):
        cov = ec_coverage(tunnel.substructure, [tunnel.start], 1, random.Random(0))
        assert cov.distinct_count == 1 and cov.tree_size == 1
        assert list(cov.first_discovery.values()) == [0]

    def test_monotone_in_n(self, tunnel):
        rng = np.random.Generator(np.random.PCG64(0))
        from mrmp.substructures import sample_configurations

        vertices = sample_configurations(tunnel.substructure, tunnel.workspace, 2, 60, rng)
        counts = [
            ec_coverage(tunnel.substructure, vertices, n, random.Random(1)).distinct_count
            for n in (10, 30, 60)
        ]
        assert counts == sorted(counts)

    def test_requires_enough_vertices(self, tunnel):
        with pytest.raises(ValueError):
            ec_coverage(tunnel.substructure, [tunnel.start], 5, random.Random(0))

    def test_all_same_class(self, tunnel):
        vertices = [tunnel.start] * 10
        cov = ec_coverage(tunnel.substructure, vertices, 10, random.Random(0))
        assert cov.distinct_count == 1


def _mini_scenario(square20):
    return Scenario(
        name="mini",
        workspace=square20,
        m=1,
        start=joint_config([[4, 4]]),
        goal=joint_config([[16, 16]]),
    )


class TestRunExperiment:
    def test_trivial_success_rate(self, square20):
        sc = _mini_scenario(square20)
        cfg = PlannerConfig(roadmap_size=30, max_vertices=400, seed=0)
        summary = run_experiment(sc, [[Metric(MetricKind.SUM_L2)]], 2, cfg)
        stats = summary.per_metric["sum_l2"]
        assert stats.success_rate == 1.0
        assert stats.quartiles is not None
        assert stats.seeds == [0, 1]

    def test_deterministic(self, square20):
        sc = _mini_scenario(square20)
        cfg = PlannerConfig(roadmap_size=30, max_vertices=400, seed=3)
        s1 = run_experiment(sc, [[Metric(MetricKind.CTD)]], 2, cfg)
        s2 = run_experiment(sc, [[Metric(MetricKind.CTD)]], 2, cfg)
        assert s1 == s2

    def test_parallel_matches_sequential(self, square20):
        sc = _mini_scenario(square20)
        cfg = PlannerConfig(roadmap_size=30, max_vertices=400, seed=1)
        combos = [[Metric(MetricKind.SUM_L2)], [Metric(MetricKind.MAX_L2)]]
        seq = run_experiment(sc, combos, 2, cfg, workers=1)
        par = run_experiment(sc, combos, 2, cfg, workers=2)
        assert seq == par

    def test_median_of_single_sample(self, square20):
        sc = _mini_scenario(square20)
        cfg = PlannerConfig(roadmap_size=30, max_vertices=400, seed=0)
        summary = run_experiment(sc, [[Metric(MetricKind.SUM_L2)]], 1, cfg)
        stats = summary.per_metric["sum_l2"]
        assert stats.quartiles[0] == stats.quartiles[1] == stats.quartiles[2] == stats.vertices[0]


def test_run_ec_coverage_rows(tunnel):
    metrics = [Metric(MetricKind.SUM_L2)]
    sc = load_bundled("tunnel", robots=2)
    cfg = sc.planner_config(roadmap_size=60, seed=0)
    rows = run_ec_coverage(sc, metrics, N=50, repetitions=2, seed=9, cfg=cfg)
    assert len(rows) == 2
    for label, rep, seed, distinct in rows:
        assert label == "sum_l2"
        assert seed == 9 + rep
        assert 1 <= distinct <= 50
