"""Tests of the acceptance suites, including injected faults."""

import json
import math

import pytest
from pytest_cases import fixture

import jscc.core.kkt
import jscc.core.special
from jscc.core import LogisticParams
from jscc.toolkit.experiments import AcceptanceOptions, run_acceptance
from jscc.toolkit.experiments.acceptance import (
    Criterion,
    _param_error,
    suite_e1,
    suite_fit,
    suite_heuristic,
    suite_inverse,
    suite_kkt,
    suite_monotonicity,
    suite_tightness,
    suite_toy_optimality,
)


@fixture
def opts() -> AcceptanceOptions:
    return AcceptanceOptions(seed=0)


def _all_pass(criteria: list[Criterion]) -> bool:
    # wall clock budgets do not hold under coverage tracing
    return bool(criteria) and all(c.passed for c in criteria if c.name != "runtime_s")


def test_e1_suite(opts):
    assert _all_pass(suite_e1(opts))


def test_inverse_suite(opts):
    assert _all_pass(suite_inverse(opts, n=100))


def test_kkt_suites(opts):
    assert _all_pass(suite_kkt(opts, n=6))
    assert _all_pass(suite_tightness(opts, n=10))


def test_planner_suites(opts):
    assert _all_pass(suite_monotonicity(opts, n=3, n_grid=20))
    assert _all_pass(suite_heuristic(opts, n=4))


def test_toy_optimality_suite(opts):
    assert _all_pass(suite_toy_optimality(opts, n=3))


def test_fit_suite(opts):
    assert _all_pass(suite_fit(opts, n=3, repeats=50, noise=0.001))


def test_fit_error_scale():
    truth = LogisticParams(a1=0.5, a2=0.9, c1=0.3, c2=0.0)
    # c2 near zero is measured on an absolute scale
    assert _param_error(LogisticParams(a1=0.5, a2=0.9, c1=0.3, c2=0.004), truth) == pytest.approx(0.004)
    wide = LogisticParams(a1=0.5, a2=0.9, c1=0.3, c2=-4.0)
    assert _param_error(LogisticParams(a1=0.5, a2=0.9, c1=0.3, c2=-4.04), wide) == pytest.approx(0.01)


def test_wrong_e1_is_caught(opts, monkeypatch):
    exact = jscc.core.special.exp_integral_e1
    monkeypatch.setattr(jscc.core.special, "exp_integral_e1", lambda g: exact(g) * (1 + 1e-6))
    report = run_acceptance("e1", opts)
    assert not report.passed
    assert {c.name for c in report.failures} >= {"max_rel_error_vs_scipy"}


def test_wrong_multiplier_is_caught(opts, monkeypatch):
    exact = jscc.core.kkt._lagrange_multiplier
    monkeypatch.setattr(jscc.core.kkt, "_lagrange_multiplier", lambda r, s: -exact(r, s))
    report = run_acceptance("tightness", opts)
    assert not report.passed
    assert report.failures[0].name == "exception"


def test_unknown_suite(opts):
    with pytest.raises(ValueError):
        run_acceptance("everything", opts)


def test_report_json(opts, monkeypatch):
    monkeypatch.setattr(
        "jscc.toolkit.experiments.acceptance.SUITES",
        {"nan": lambda o: [Criterion("nan", "value", math.nan, 1.0, False)]},
    )
    report = run_acceptance("all", opts)
    data = json.loads(report.to_json())
    assert data["passed"] is False
    assert data["criteria"][0]["value"] is None
    assert data["criteria"][0]["bound"] == 1.0


@pytest.mark.slow
def test_all_suites():
    report = run_acceptance("all", AcceptanceOptions(trials=5, num_slots=100_000))
    failures = [f"{c.suite}.{c.name}" for c in report.failures if c.name != "runtime_s"]
    assert not failures, failures
