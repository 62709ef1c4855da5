"""Multi-robot motion-planning metrics, planner, and analysis tools."""

from .geometry import JointConfig, Pose, Segment, Workspace, joint_config
from .metrics import Metric, MetricKind, evaluate, parse_metric
from .nn import AlternatingStore, NnStore
from .planner import PlannerConfig, PlanResult, solve
from .scenarios import Scenario, load_bundled, load_scenario
from .substructures import SubstructureSpec, classify, natural_distance, neighbors

__all__ = [
    "AlternatingStore",
    "JointConfig",
    "Metric",
    "MetricKind",
    "NnStore",
    "PlanResult",
    "PlannerConfig",
    "Pose",
    "Scenario",
    "Segment",
    "SubstructureSpec",
    "Workspace",
    "classify",
    "evaluate",
    "joint_config",
    "load_bundled",
    "load_scenario",
    "natural_distance",
    "neighbors",
    "parse_metric",
    "solve",
]

__version__ = "0.1.0"
