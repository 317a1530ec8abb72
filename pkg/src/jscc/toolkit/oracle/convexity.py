"""Finite difference convexity check of the per-device latency constraint.

The constraint of one device in terms of its time share, threshold and edge
CPU share is

.. math:: f(\\tau, g, f^c) = a + \\frac{b}{\\tau} e^{g} + \\frac{c}{f^c} - T.

It is convex on the interior iff the leading principal minors of its Hessian
are positive.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .p4 import OracleOptions

log = logging.getLogger(__name__)

#: Smallest accepted normalized minor.
MINOR_TOL = -1e-8


@dataclass(frozen=True)
class LatencyConstraint:
    """Coefficients of one latency constraint.

    ``a`` is the local latency, ``b`` the transmission load at ``g = 0`` and
    ``c`` the decoding cycles.
    """

    a: float
    b: float
    c: float
    T: float

    def __call__(self, x: NDArray) -> float:
        """Evaluate the constraint at ``x = (tau, g, f_c)``."""
        tau, g, f_c = x
        return self.a + self.b * math.exp(g) / tau + self.c / f_c - self.T

    def hessian(self, x: NDArray) -> NDArray:
        """Analytic Hessian at ``x = (tau, g, f_c)``."""
        tau, g, f_c = x
        w = self.b * math.exp(g)
        return np.array(
            [
                [2 * w / tau**3, -w / tau**2, 0.0],
                [-w / tau**2, w / tau, 0.0],
                [0.0, 0.0, 2 * self.c / f_c**3],
            ]
        )


@dataclass
class ConvexityVerdict:
    """Outcome of a convexity sweep."""

    passed: bool
    n_checked: int
    n_skipped: int
    min_minor: float
    minors: NDArray = field(default_factory=lambda: np.empty((0, 3)))


def leading_minors(H: NDArray) -> NDArray:
    """Leading principal minors of a square matrix."""
    return np.array([np.linalg.det(H[: i + 1, : i + 1]) for i in range(len(H))])


def fd_hessian(func: Callable[[NDArray], float], x: NDArray, step: float) -> NDArray | None:
    """Central finite difference Hessian with relative steps.

    Returns None if a step leaves the positive orthant of ``tau`` and ``f_c``
    or the function is not finite around ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    h = step * np.maximum(np.abs(x), 1.0)
    if x[0] - h[0] <= 0 or x[2] - h[2] <= 0:
        return None

    def at(*moves: tuple[int, float]) -> float:
        y = x.copy()
        for i, sign in moves:
            y[i] += sign * h[i]
        return func(y)

    f0 = func(x)
    H = np.empty((n, n))
    for i in range(n):
        H[i, i] = (at((i, 1)) - 2 * f0 + at((i, -1))) / h[i] ** 2
        for j in range(i + 1, n):
            H[i, j] = H[j, i] = (
                at((i, 1), (j, 1))
                - at((i, 1), (j, -1))
                - at((i, -1), (j, 1))
                + at((i, -1), (j, -1))
            ) / (4 * h[i] * h[j])
    if not np.all(np.isfinite(H)):
        return None
    return H


def normalized_minors(H: NDArray) -> NDArray:
    """Minors after scaling rows and columns to a unit diagonal magnitude."""
    scale = 1 / np.sqrt(np.abs(np.diag(H)))
    return leading_minors(H * np.outer(scale, scale))


def sample_interior(
    constraint: LatencyConstraint,
    d: float,
    edge_cpu: float,
    n: int,
    rng: np.random.Generator,
) -> NDArray:
    """Random interior points: ``tau`` in (0, 1), ``g > d``, ``f_c`` in (0, F)."""
    tau = rng.uniform(0.05, 1.0, n)
    g = d + rng.uniform(0.01, 2.0, n)
    f_c = edge_cpu * rng.uniform(0.01, 1.0, n)
    return np.stack([tau, g, f_c], axis=1)


def check_constraint_convexity(
    samples: NDArray,
    func: Callable[[NDArray], float],
    opts: OracleOptions | None = None,
) -> ConvexityVerdict:
    """Check the normalized leading minors of ``func`` at every sample.

    Parameters
    ----------
    samples: array of shape (n, 3)
        Interior points ``(tau, g, f_c)``.
    func: callable
        Function of one point, typically a :class:`LatencyConstraint`.
    opts: OracleOptions
        Only the finite difference step is used.
    """
    opts = opts or OracleOptions()
    minors, skipped = [], 0
    for x in np.atleast_2d(samples):
        H = fd_hessian(func, x, opts.step)
        if H is None or np.any(np.diag(H) == 0):
            skipped += 1
            log.warning("Skipped convexity sample %s: step leaves the domain", x)
            continue
        minors.append(normalized_minors(H))
    minors_arr = np.array(minors).reshape(-1, 3)
    min_minor = float(minors_arr.min()) if len(minors_arr) else math.nan
    return ConvexityVerdict(
        passed=bool(len(minors_arr)) and min_minor > MINOR_TOL,
        n_checked=len(minors_arr),
        n_skipped=skipped,
        min_minor=min_minor,
        minors=minors_arr,
    )
