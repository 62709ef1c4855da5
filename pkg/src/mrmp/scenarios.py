"""Scenario corpus: JSON schema, loading, validation, and bundled benchmark scenes.

A scenario file pins everything an experiment needs: workspace polygons (in
workspace length units), robot count and footprint, start/goal joint
configurations, an optional substructure annotation, and planner parameter
overrides. Geometry that the benchmark description leaves open is fixed here
so results are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .geometry import (
    JointConfig,
    ValidationError,
    Workspace,
    joint_config,
    joint_free,
    points_in_polygon,
)
from .metrics import Metric, parse_metric
from .planner import PlannerConfig
from .substructures import Region, SubstructureSpec


class ScenarioError(ValueError):
    """Scenario file violates the schema or an invariant; names the field."""

    def __init__(self, fieldname: str, message: str):
        self.fieldname = fieldname
        super().__init__(f"{fieldname}: {message}")


@dataclass(eq=True)
class Scenario:
    name: str
    workspace: Workspace
    m: int
    start: JointConfig
    goal: JointConfig
    substructure: SubstructureSpec | None = None
    planner_overrides: dict = field(default_factory=dict)

    def planner_config(self, **overrides) -> PlannerConfig:
        """PlannerConfig from scenario defaults, overridden by keyword arguments."""
        params = dict(self.planner_overrides)
        params.update(overrides)
        metrics = params.pop("metrics", (Metric(parse_metric("sum_l2").kind),))
        if metrics and not isinstance(metrics[0], Metric):
            metrics = tuple(parse_metric(k) for k in metrics)
        return PlannerConfig(metrics=tuple(metrics), **params)

    def to_dict(self) -> dict:
        doc: dict = {
            "name": self.name,
            "workspace": {
                "boundary": [list(v) for v in self.workspace.boundary],
                "obstacles": [[list(v) for v in o] for o in self.workspace.obstacles],
                "robot_radius": self.workspace.robot_radius,
                "robot_shape": (
                    "disc"
                    if self.workspace.is_disc
                    else [list(v) for v in self.workspace.robot_shape]
                ),
            },
            "m": self.m,
            "start": [[p.x, p.y, p.theta] for p in self.start],
            "goal": [[p.x, p.y, p.theta] for p in self.goal],
        }
        if self.substructure is not None:
            sub: dict = {
                "kind": self.substructure.kind,
                "regions": [
                    {
                        "rect": list(r.rect),
                        "order_axis": r.order_axis,
                        "order_descending": r.order_descending,
                    }
                    for r in self.substructure.regions
                ],
            }
            if self.substructure.adjacency is not None:
                sub["adjacency"] = [list(p) for p in self.substructure.adjacency]
            if self.substructure.capacity is not None:
                sub["capacity"] = self.substructure.capacity
            doc["substructure"] = sub
        if self.planner_overrides:
            doc["planner"] = dict(self.planner_overrides)
        return doc


def _require(doc: dict, key: str, fieldname: str | None = None):
    if key not in doc:
        raise ScenarioError(fieldname or key, "missing required field")
    return doc[key]


def scenario_from_dict(doc: dict, robots: int | None = None) -> Scenario:
    name = doc.get("name", "unnamed")
    wdoc = _require(doc, "workspace")
    shape = wdoc.get("robot_shape", "disc")
    if shape != "disc":
        shape = tuple(tuple(float(c) for c in v) for v in shape)
    try:
        workspace = Workspace(
            boundary=tuple(tuple(float(c) for c in v) for v in _require(wdoc, "boundary", "workspace.boundary")),
            obstacles=tuple(
                tuple(tuple(float(c) for c in v) for v in o) for o in wdoc.get("obstacles", [])
            ),
            robot_radius=float(wdoc.get("robot_radius", 1.0)),
            robot_shape=shape,
        )
    except ValidationError as exc:
        raise ScenarioError("workspace", str(exc)) from exc

    m = int(_require(doc, "m"))
    start_rows = _require(doc, "start")
    goal_rows = _require(doc, "goal")
    if len(start_rows) != m:
        raise ScenarioError("start", f"expected {m} robot poses, got {len(start_rows)}")
    if len(goal_rows) != m:
        raise ScenarioError("goal", f"expected {m} robot poses, got {len(goal_rows)}")
    if robots is not None:
        if not 1 <= robots <= m:
            raise ScenarioError("robots", f"robot count override {robots} outside 1..{m}")
        start_rows = start_rows[:robots]
        goal_rows = goal_rows[:robots]
        m = robots
    start = joint_config(start_rows)
    goal = joint_config(goal_rows)
    if not joint_free(workspace, start):
        raise ScenarioError("start", "start configuration is in collision")
    if not joint_free(workspace, goal):
        raise ScenarioError("goal", "goal configuration is in collision")

    substructure = None
    if "substructure" in doc and doc["substructure"] is not None:
        sdoc = doc["substructure"]
        regions = tuple(
            Region(
                rect=tuple(float(c) for c in _require(r, "rect", "substructure.rect")),
                order_axis=r.get("order_axis", "x"),
                order_descending=bool(r.get("order_descending", False)),
            )
            for r in _require(sdoc, "regions", "substructure.regions")
        )
        boundary_arr = np.asarray(workspace.boundary, dtype=float)
        for i, region in enumerate(regions):
            x0, y0, x1, y1 = region.rect
            corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
            center = corners.mean(axis=0)
            shrunk = corners * (1 - 1e-9) + center * 1e-9
            if not points_in_polygon(shrunk, boundary_arr).all():
                raise ScenarioError(
                    f"substructure.regions[{i}]", "region rect extends outside the workspace"
                )
        adjacency = sdoc.get("adjacency")
        if adjacency is not None:
            adjacency = tuple(tuple(int(i) for i in pair) for pair in adjacency)
        try:
            substructure = SubstructureSpec(
                kind=_require(sdoc, "kind", "substructure.kind"),
                regions=regions,
                robot_radius=workspace.robot_radius,
                adjacency=adjacency,
                capacity=sdoc.get("capacity"),
            )
        except ValueError as exc:
            raise ScenarioError("substructure", str(exc)) from exc

    planner_overrides = dict(doc.get("planner", {}))
    return Scenario(
        name=name,
        workspace=workspace,
        m=m,
        start=start,
        goal=goal,
        substructure=substructure,
        planner_overrides=planner_overrides,
    )


def load_scenario(path: str | Path, robots: int | None = None) -> Scenario:
    """Load and fully validate a scenario file; errors name the offending field."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except FileNotFoundError:
        raise ScenarioError("path", f"no such scenario file: {p}")
    except json.JSONDecodeError as exc:
        raise ScenarioError("json", f"parse error in {p}: {exc}")
    return scenario_from_dict(doc, robots=robots)


BUNDLED = ("tunnel", "chambers", "puzzle", "general", "lgrid")


def bundled_scenario_path(name: str) -> Path:
    if name not in BUNDLED:
        raise ScenarioError("name", f"unknown bundled scenario {name!r} (have {BUNDLED})")
    return Path(str(resources.files("mrmp") / "data" / f"{name}.json"))


def load_bundled(name: str, robots: int | None = None) -> Scenario:
    return load_scenario(bundled_scenario_path(name), robots=robots)
