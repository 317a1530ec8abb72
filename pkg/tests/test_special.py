"""Tests of the exponential integral and its inverse."""

import math
import sys

import numpy as np
import numpy.testing as npt
import pytest
from pytest_cases import parametrize
from scipy.special import exp1

from jscc.core.exceptions import DomainError
from jscc.core.special import exp_integral_e1, exp_integral_e1_quad, min_threshold


@parametrize(g=[1e-8, 1e-3, 0.3, 0.999, 1.0, 1.001, 2.5, 10.0, 50.0])
def test_e1_matches_scipy(g: float):
    npt.assert_allclose(exp_integral_e1(g), exp1(g), rtol=1e-12)


@parametrize(g=[1e-5, 0.5, 1.0, 7.0, 40.0])
def test_e1_matches_quadrature(g: float):
    npt.assert_allclose(exp_integral_e1(g), exp_integral_e1_quad(g), rtol=1e-10)


def test_e1_known_values():
    npt.assert_allclose(exp_integral_e1(1.0), 0.21938393439552029, rtol=1e-14)
    npt.assert_allclose(exp_integral_e1(0.5), 0.5597735947761608, rtol=1e-14)
    npt.assert_allclose(exp_integral_e1(10.0), 4.156968929685324e-06, rtol=1e-12)


def test_e1_bracketed():
    # exp(-g) / (g + 1) < E1(g) < exp(-g) / g
    for g in np.logspace(-3, 1.7, 120):
        e1 = exp_integral_e1(g)
        assert math.exp(-g) / (g + 1) < e1 < math.exp(-g) / g


def test_e1_decreasing():
    grid = np.logspace(-6, 1.5, 300)
    values = np.array([exp_integral_e1(g) for g in grid])
    assert np.all(np.diff(values) < 0)


@parametrize(g=[0.0, -1.0, math.nan])
def test_e1_domain(g: float):
    with pytest.raises(DomainError):
        exp_integral_e1(g)


@parametrize(c=[1e-6, 1e-3, 0.1, 1.0, 10.0, 100.0, 500.0])
def test_min_threshold_inverts_e1(c: float):
    d = min_threshold(c)
    assert d > 0
    npt.assert_allclose(exp_integral_e1(d), c, rtol=1e-8)


def test_min_threshold_decreasing():
    ds = [min_threshold(c) for c in (0.01, 0.1, 1.0, 10.0)]
    assert all(a > b for a, b in zip(ds[:-1], ds[1:]))


def test_min_threshold_tolerance():
    coarse = min_threshold(2.0, epsilon2=1e-4)
    fine = min_threshold(2.0, epsilon2=1e-12)
    npt.assert_allclose(coarse, fine, rtol=2e-4)


@parametrize(c=[0.0, -3.0])
def test_min_threshold_domain(c: float):
    with pytest.raises(DomainError):
        min_threshold(c)


def test_min_threshold_beyond_bisection():
    # E1(d) = -gamma - ln d up to O(d) for tiny d
    d = min_threshold(700.0)
    assert 0 < d < math.exp(-699)
    npt.assert_allclose(exp_integral_e1(d), 700.0, rtol=1e-12)


@parametrize(c=[1e3, 1e6])
def test_min_threshold_huge_target(c: float):
    d = min_threshold(c)
    assert d == sys.float_info.min
    assert exp_integral_e1(d) <= c
    assert min_threshold(c) <= min_threshold(699.0)
