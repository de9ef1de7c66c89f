"""Plan, cost, and verify GHZ-state distribution over Bell-pair networks."""
from .graph import Graph, GraphError
from .planner import CostReport, Plan, Star, cost_report, plan_complete, plan_subset

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphError",
    "Star",
    "Plan",
    "CostReport",
    "plan_complete",
    "plan_subset",
    "cost_report",
]
