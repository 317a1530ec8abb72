"""Delay model and planners of the multi-device uplink."""

from .allocation import Allocation, AllocationRow
from .channel import SimOptions, simulate_device, validate_allocation
from .fitting import default_logistic_table, fit_logistic
from .kkt import P4Instance, P4Solution, solve_p4, threshold_table
from .planners import PlanReport, PlanStatus, SolverOptions, Strategy, get_planner
from .special import exp_integral_e1, min_threshold
from .system import DeviceProfile, LogisticParams, SystemConfig

__all__ = [
    "Allocation",
    "AllocationRow",
    "DeviceProfile",
    "LogisticParams",
    "P4Instance",
    "P4Solution",
    "PlanReport",
    "PlanStatus",
    "SimOptions",
    "SolverOptions",
    "Strategy",
    "SystemConfig",
    "default_logistic_table",
    "exp_integral_e1",
    "fit_logistic",
    "get_planner",
    "min_threshold",
    "simulate_device",
    "solve_p4",
    "threshold_table",
    "validate_allocation",
]
