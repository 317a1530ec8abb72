"""Tests of the numerical oracles."""

import math

import numpy as np
import numpy.testing as npt
import pytest
from pytest_cases import parametrize

from jscc.core.exceptions import OracleRefusalError
from jscc.core.kkt import InfeasibilityReason, P4Instance, solve_p4, threshold_table
from jscc.core.model import device_threshold, local_latency, transmit_load
from jscc.core.planners import OptimalPlanner, SolverOptions, init_bounds
from jscc.toolkit.experiments import ScenarioSpec, generate_scenario
from jscc.toolkit.oracle import (
    BRUTE_FORCE_GUARD,
    LatencyConstraint,
    OracleOptions,
    brute_force_p3,
    check_constraint_convexity,
    fd_hessian,
    leading_minors,
    oracle_solve_p4,
    sample_interior,
)


def _constraint(cfg, dev, o, T) -> LatencyConstraint:
    return LatencyConstraint(
        a=local_latency(cfg, dev),
        b=transmit_load(cfg, dev, o, 0.0),
        c=dev.image_count * cfg.decode_cycles,
        T=T,
    )


def test_fd_hessian_matches_analytic(scenario):
    cfg, devices = scenario
    dev = devices[0]
    constraint = _constraint(cfg, dev, cfg.max_cr, 1.0)
    rng = np.random.default_rng(0)
    d = device_threshold(cfg, dev, cfg.max_cr)
    for x in sample_interior(constraint, d, cfg.edge_cpu, 20, rng):
        H = fd_hessian(constraint, x, 1e-4)
        assert H is not None
        exact = constraint.hessian(x)
        scale = np.sqrt(np.outer(np.diag(exact), np.diag(exact)))
        npt.assert_allclose(H / scale, exact / scale, atol=1e-4)


def test_fd_hessian_leaves_domain():
    constraint = LatencyConstraint(a=0.0, b=1.0, c=1.0, T=1.0)
    assert fd_hessian(constraint, np.array([1e-9, 0.1, 1.0]), 1e-3) is None


def test_leading_minors():
    H = np.diag([2.0, 3.0, 4.0])
    npt.assert_allclose(leading_minors(H), [2.0, 6.0, 24.0])


def test_latency_constraint_is_convex(scenario):
    cfg, devices = scenario
    for dev in devices:
        o = cfg.max_cr
        constraint = _constraint(cfg, dev, o, 1.0)
        rng = np.random.default_rng(1)
        samples = sample_interior(constraint, device_threshold(cfg, dev, o), cfg.edge_cpu, 50, rng)
        verdict = check_constraint_convexity(samples, constraint)
        assert verdict.passed
        assert verdict.n_checked + verdict.n_skipped == 50


def test_concave_function_fails():
    samples = np.array([[0.5, 0.5, 0.5], [0.2, 1.0, 0.8]])
    verdict = check_constraint_convexity(samples, lambda x: -float(x @ x))
    assert not verdict.passed
    assert verdict.min_minor < 0


def test_oracle_infeasible_reasons(scenario):
    cfg, devices = scenario
    crs = (cfg.max_cr,) * len(devices)
    T = 0.5 * min(local_latency(cfg, dev) for dev in devices)
    sol = oracle_solve_p4(P4Instance(cfg, tuple(devices), crs, T))
    assert sol.reason is InfeasibilityReason.NO_TIME_AFTER_LOCAL


@parametrize(factor=[1.0, 2.5])
def test_oracle_matches_closed_form(scenario, factor: float):
    cfg, devices = scenario
    table = threshold_table(cfg, devices)
    _, t_max = init_bounds(cfg, devices, table)
    crs = tuple(cfg.cr_catalog[n] for n in table.best_index())
    inst = P4Instance(cfg, tuple(devices), crs, factor * t_max)
    ref = oracle_solve_p4(inst, OracleOptions(n_starts=3, seed=4))
    sol = solve_p4(inst)
    npt.assert_allclose(ref.sum_tau, sol.sum_tau, rtol=1e-6)
    npt.assert_allclose(ref.mu_star, sol.mu_star, rtol=1e-3)
    npt.assert_allclose(np.sum(ref.f_c), cfg.edge_cpu, rtol=1e-9)


def test_brute_force_agrees_with_exhaustive_planner():
    cfg, devices = generate_scenario(
        ScenarioSpec(K=2, seed=5, system={"cr_catalog": ["1/6", "1/12"]})
    )
    report = OptimalPlanner(options=SolverOptions(epsilon=1e-3)).plan(cfg, devices)
    opts = OracleOptions(n_starts=2)
    idx, best = brute_force_p3(cfg, devices, report.system_delay, opts)
    assert idx == report.cr_indices
    assert best <= 1 + 1e-6
    _, below = brute_force_p3(cfg, devices, report.system_delay * (1 - 1e-3), opts)
    assert below > 1


def test_brute_force_guard(scenario):
    cfg, _ = scenario
    n = len(cfg.cr_catalog)
    K = math.ceil(math.log(BRUTE_FORCE_GUARD + 1) / math.log(n))
    devices = generate_scenario(ScenarioSpec(K=K))[1]
    with pytest.raises(OracleRefusalError):
        brute_force_p3(cfg, devices, 1.0)


def test_options_validation():
    with pytest.raises(ValueError):
        OracleOptions(grid_resolution=4)
    with pytest.raises(ValueError):
        OracleOptions(shrink=1.5)
