"""Planners of the system delay."""

from .base import (
    BasePlanner,
    BisectionPlanner,
    P,
    PlanReport,
    PlanStatus,
    SolverOptions,
    Strategy,
    TraceProbe,
    WorkCounters,
    get_planner,
    init_bounds,
    list_planners,
)
from .baselines import (
    EqualPlanner,
    FixedRatioPlanner,
    FixedThresholdPlanner,
    solve_equ,
    solve_fix_g,
    solve_fix_o,
)
from .heuristic import HeuristicPlanner, solve_heuristic
from .optimal import OptimalPlanner, solve_optimal
from .verify import ConstraintCheck, Verdict, verify_report

__all__ = [
    "BasePlanner",
    "BisectionPlanner",
    "ConstraintCheck",
    "EqualPlanner",
    "FixedRatioPlanner",
    "FixedThresholdPlanner",
    "HeuristicPlanner",
    "OptimalPlanner",
    "P",
    "PlanReport",
    "PlanStatus",
    "SolverOptions",
    "Strategy",
    "TraceProbe",
    "Verdict",
    "WorkCounters",
    "get_planner",
    "init_bounds",
    "list_planners",
    "solve_equ",
    "solve_fix_g",
    "solve_fix_o",
    "solve_heuristic",
    "solve_optimal",
    "verify_report",
]
