import json
from pathlib import Path

import pytest

from mrmp.cli import main
from mrmp.scenarios import (
    BUNDLED,
    ScenarioError,
    bundled_scenario_path,
    load_bundled,
    load_scenario,
    scenario_from_dict,
)


class TestScenarioLoading:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled_load_and_roundtrip(self, name):
        sc = load_bundled(name)
        again = scenario_from_dict(sc.to_dict())
        assert again == sc

    def test_tunnel_parameters(self, tunnel):
        assert tunnel.m == 6
        assert tunnel.workspace.robot_radius == 2.0
        # every arm of the T is 5 wide
        xs = [v[0] for v in tunnel.workspace.boundary]
        ys = [v[1] for v in tunnel.workspace.boundary]
        assert max(ys[:4]) - min(ys) >= 5

    def test_puzzle_parameters(self, puzzle):
        assert puzzle.m == 8
        assert puzzle.substructure.kind == "pebbles"
        assert len(puzzle.substructure.regions) == 9

    def test_robots_truncation(self):
        sc = load_bundled("tunnel", robots=4)
        assert sc.m == 4 and len(sc.start) == 4

    def test_collision_start_rejected(self, tmp_path):
        doc = load_bundled("tunnel").to_dict()
        doc["start"][0] = [0.0, 0.0, 0.0]  # wall contact
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ScenarioError) as err:
            load_scenario(path)
        assert "start" in str(err.value)

    def test_wrong_m_rejected(self, tmp_path):
        doc = load_bundled("tunnel").to_dict()
        doc["m"] = 5
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ScenarioError):
            load_scenario(path)

    def test_region_outside_workspace_rejected(self, tmp_path):
        doc = load_bundled("puzzle").to_dict()
        doc["substructure"]["regions"][0]["rect"] = [-50, -50, -40, -40]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ScenarioError) as err:
            load_scenario(path)
        assert "regions" in str(err.value)

    def test_parse_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioError):
            load_scenario(path)

    def test_missing_file(self):
        with pytest.raises(ScenarioError):
            load_scenario("/nonexistent/scene.json")


def write_mini_scenario(tmp_path: Path) -> Path:
    doc = {
        "name": "mini",
        "workspace": {
            "boundary": [[0, 0], [20, 0], [20, 20], [0, 20]],
            "obstacles": [],
            "robot_radius": 2.0,
            "robot_shape": "disc",
        },
        "m": 2,
        "start": [[4, 4], [16, 16]],
        "goal": [[16, 4], [4, 16]],
        "substructure": {
            "kind": "partitions",
            "regions": [{"rect": [0, 0, 20, 10]}, {"rect": [0, 10, 20, 20]}],
        },
        "planner": {"roadmap_size": 40, "max_vertices": 600},
    }
    path = tmp_path / "mini.json"
    path.write_text(json.dumps(doc))
    return path


class TestCli:
    def test_plan_solved_exit_zero(self, tmp_path):
        scene = write_mini_scenario(tmp_path)
        out = tmp_path / "run"
        code = main([
            "plan", "--scenario", str(scene), "--metric", "eps2",
            "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        stats = json.loads((out / "stats.json").read_text())
        assert stats["status"] == "solved"
        path = json.loads((out / "path.json").read_text())
        assert path[0] == [[4, 4, 0], [16, 16, 0]]
        assert (out / "tree_trace.jsonl").exists()

    def test_plan_exhausted_exit_two(self, tmp_path):
        scene = write_mini_scenario(tmp_path)
        out = tmp_path / "run2"
        code = main([
            "plan", "--scenario", str(scene), "--metric", "sum_l2",
            "--max-vertices", "1", "--seed", "0", "--out", str(out),
        ])
        assert code == 2
        assert not (out / "path.json").exists()

    def test_input_error_exit_three(self, tmp_path):
        code = main([
            "plan", "--scenario", str(tmp_path / "missing.json"),
            "--metric", "sum_l2", "--out", str(tmp_path / "o"),
        ])
        assert code == 3

    def test_unknown_metric_exit_three(self, tmp_path):
        scene = write_mini_scenario(tmp_path)
        code = main([
            "plan", "--scenario", str(scene), "--metric", "bogus",
            "--out", str(tmp_path / "o"),
        ])
        assert code == 3

    def test_plan_determinism(self, tmp_path):
        scene = write_mini_scenario(tmp_path)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main([
                "plan", "--scenario", str(scene), "--metric", "ctd",
                "--seed", "11", "--out", str(out),
            ])
            outs.append((out / "tree_trace.jsonl").read_bytes())
        assert outs[0] == outs[1]

    def test_alternate_plan_trace(self, tmp_path):
        scene = write_mini_scenario(tmp_path)
        out = tmp_path / "alt"
        code = main([
            "plan", "--scenario", str(scene), "--alternate",
            "--metrics", "eps2,sum_l2", "--seed", "2", "--out", str(out),
        ])
        assert code in (0, 2)
        labels = ("eps2", "sum_l2")
        records = [
            json.loads(line)
            for line in (out / "tree_trace.jsonl").read_text().splitlines()
        ]
        assert records[0]["metric"] is None
        for rec in records[1:]:
            assert rec["metric"] == labels[(rec["attempt"] - 1) % 2]

    def test_gamma_csv(self, tmp_path):
        scene = write_mini_scenario(tmp_path)
        out = tmp_path / "gamma.csv"
        code = main([
            "gamma", "--scenario", str(scene), "--tau", "1",
            "--samples", "60", "--seed", "5", "--metrics", "sum_l2,ctd",
            "--include-natural", "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "scenario,metric,s,tau,samples,pairs,gamma,ci_low,ci_high"
        assert len(lines) == 4  # header + 2 metrics + d_k row
        dk = lines[-1].split(",")
        assert dk[1] == "d_k" and float(dk[6]) == 1.0

    def test_gamma_requires_substructure(self, tmp_path):
        doc = json.loads(write_mini_scenario(tmp_path).read_text())
        del doc["substructure"]
        scene = tmp_path / "nosub.json"
        scene.write_text(json.dumps(doc))
        code = main([
            "gamma", "--scenario", str(scene), "--tau", "1",
            "--out", str(tmp_path / "g.csv"),
        ])
        assert code == 3

    def test_ec_coverage_csv_and_determinism(self, tmp_path):
        scene = write_mini_scenario(tmp_path)
        outs = []
        for name in ("c1.csv", "c2.csv"):
            out = tmp_path / name
            code = main([
                "ec-coverage", "--scenario", str(scene), "--tree-size", "30",
                "--reps", "2", "--seed", "4", "--metrics", "sum_l2",
                "--out", str(out),
            ])
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        lines = outs[0].decode().splitlines()
        assert lines[0] == "scenario,metric,rep,seed,tree_size,distinct_ec"
        assert len(lines) == 3

    def test_ec_coverage_tree_size_one(self, tmp_path):
        scene = write_mini_scenario(tmp_path)
        out = tmp_path / "one.csv"
        main([
            "ec-coverage", "--scenario", str(scene), "--tree-size", "1",
            "--reps", "2", "--seed", "0", "--metrics", "sum_l2", "--out", str(out),
        ])
        for line in out.read_text().splitlines()[1:]:
            assert line.endswith(",1")

    def test_sweep_s_csv(self, tmp_path):
        scene = write_mini_scenario(tmp_path)
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep-s", "--scenario", str(scene), "--metric", "eps2",
            "--s-values", "0.5,1.0", "--reps", "2", "--seed", "8",
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "scenario,metric,s,reps,success_rate,q1,median,q3"
        assert len(lines) == 3
        assert [row.split(",")[2] for row in lines[1:]] == ["0.5", "1.0"]


def test_bundled_path_exists():
    for name in BUNDLED:
        assert bundled_scenario_path(name).exists()
    with pytest.raises(ScenarioError):
        bundled_scenario_path("nope")
