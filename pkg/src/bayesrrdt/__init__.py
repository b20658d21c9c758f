"""RRdT* with a Bayesian directional proposal, RRT*-family baselines and benchmarks."""
from .cspace import PlanarArm, PointRobot, World
from .planner_rrdt import PlannerConfig, plan
from .baselines import BaselineConfig, plan_baseline

__all__ = ["World", "PointRobot", "PlanarArm", "PlannerConfig", "plan", "BaselineConfig",
           "plan_baseline"]
__version__ = "0.1.0"
