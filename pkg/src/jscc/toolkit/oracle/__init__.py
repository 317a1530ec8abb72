"""Slow, independent verifiers of the closed-form solvers."""

from .convexity import (
    ConvexityVerdict,
    LatencyConstraint,
    check_constraint_convexity,
    fd_hessian,
    leading_minors,
    normalized_minors,
    sample_interior,
)
from .p4 import BRUTE_FORCE_GUARD, OracleOptions, brute_force_p3, oracle_solve_p4

__all__ = [
    "BRUTE_FORCE_GUARD",
    "ConvexityVerdict",
    "LatencyConstraint",
    "OracleOptions",
    "brute_force_p3",
    "check_constraint_convexity",
    "fd_hessian",
    "leading_minors",
    "normalized_minors",
    "oracle_solve_p4",
    "sample_interior",
]
