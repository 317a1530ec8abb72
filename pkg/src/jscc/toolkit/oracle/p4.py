"""Numerical solver of the fixed compression ratio problem.

The solver does not use the KKT closed form. With every threshold at its lower
bound and every latency constraint tight, the time share of a device is a
function of its edge CPU share only,

.. math:: \\tau_k(f_k) = \\frac{b_k}{s_k - e_k / f_k},

which is decreasing in ``f_k``. The total time share is then minimized over
``{f_k > e_k / s_k, \\sum_k f_k = F^c}`` by exact line searches along pairs of
coordinates, from several starting points.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize_scalar

from jscc.core.exceptions import OracleRefusalError, UnsatisfiableError
from jscc.core.kkt import (
    InfeasibilityReason,
    P4Instance,
    P4Solution,
    P4Status,
    time_budget,
)
from jscc.core.model import device_threshold, transmit_load
from jscc.core.special import DEFAULT_EPSILON2
from jscc.core.system import DeviceProfile, SystemConfig

log = logging.getLogger(__name__)

#: Largest number of compression ratio tuples enumerated by the brute force.
BRUTE_FORCE_GUARD = 100_000


@dataclass
class OracleOptions:
    """Settings of the numerical oracles."""

    grid_resolution: int = 16
    """Points of the coarse grid bracketing each line search."""
    step: float = 1e-5
    """Relative finite difference step of the convexity checker."""
    shrink: float = 0.5
    """Fraction of the slack used by the random starting points."""
    tol: float = 1e-9
    """Relative spread of the marginal rates below which a descent stops."""
    n_probes: int = 100
    """Random interior points per convexity check."""
    n_starts: int = 8
    max_sweeps: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        """Validate the options."""
        if self.grid_resolution < 8:
            raise ValueError("grid_resolution must be at least 8.")
        for name in ("step", "shrink", "tol", "n_probes", "n_starts", "max_sweeps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive.")
        if self.shrink > 1:
            raise ValueError("shrink must be in (0, 1].")


def _share(b: float, s: float, e: float, f: float) -> float:
    """Time share of one device when its latency constraint is tight."""
    left = s - e / f if f > 0 else -math.inf
    return b / left if left > 0 else math.inf


def _pair_search(
    i: int,
    j: int,
    f: NDArray,
    b: NDArray,
    s: NDArray,
    e: NDArray,
    lower: NDArray,
    resolution: int,
) -> None:
    """Move edge CPU between devices ``i`` and ``j`` to minimize their shares."""
    total = f[i] + f[j]
    lo, hi = lower[i], total - lower[j]
    if not hi > lo:
        return

    def cost(x: float) -> float:
        return _share(b[i], s[i], e[i], x) + _share(b[j], s[j], e[j], total - x)

    grid = np.linspace(lo, hi, resolution + 2)[1:-1]
    values = [cost(x) for x in grid]
    best = int(np.argmin(values))
    left = grid[best - 1] if best > 0 else lo
    right = grid[best + 1] if best < resolution - 1 else hi
    res = minimize_scalar(
        cost,
        bounds=(left, right),
        method="bounded",
        options={"xatol": 1e-14 * total, "maxiter": 500},
    )
    x = float(res.x) if res.fun <= values[best] else float(grid[best])
    if cost(x) <= cost(f[i]):
        f[i], f[j] = x, total - x


def _descent(
    f0: NDArray,
    b: NDArray,
    s: NDArray,
    e: NDArray,
    lower: NDArray,
    opts: OracleOptions,
) -> tuple[NDArray, float]:
    """Pairwise descent until the marginal rates agree or progress stops."""
    f = f0.copy()
    value = sum(_share(*args) for args in zip(b, s, e, f, strict=True))
    pairs = list(itertools.combinations(range(len(f)), 2))
    for _ in range(opts.max_sweeps):
        for i, j in pairs:
            _pair_search(i, j, f, b, s, e, lower, opts.grid_resolution)
        new = sum(_share(*args) for args in zip(b, s, e, f, strict=True))
        rate = _marginal_rate(f, b, s, e)
        if np.ptp(rate) <= opts.tol * np.mean(rate) or new >= value:
            return f, new
        value = new
    log.warning("Pairwise descent stopped after %d sweeps", opts.max_sweeps)
    return f, value


def _marginal_rate(f: NDArray, b: NDArray, s: NDArray, e: NDArray) -> NDArray:
    """Decrease of each time share per extra edge CPU cycle, ``-d tau_k / d f_k``."""
    return b * e / (s * f - e) ** 2


def _starting_points(lower: NDArray, edge_cpu: float, opts: OracleOptions) -> list[NDArray]:
    """Equal split of the slack, then seeded random splits."""
    K = len(lower)
    slack = edge_cpu - lower.sum()
    rng = np.random.default_rng(opts.seed)
    starts = [lower + slack / K]
    for _ in range(opts.n_starts - 1):
        w = rng.dirichlet(np.ones(K))
        starts.append(lower + slack * (opts.shrink * w + (1 - opts.shrink) / K))
    return starts


def oracle_solve_p4(
    instance: P4Instance,
    opts: OracleOptions | None = None,
    epsilon2: float = DEFAULT_EPSILON2,
) -> P4Solution:
    """Solve a fixed compression ratio instance by numerical descent.

    Infeasible instances get the same reasons as the closed-form solver.
    """
    opts = opts or OracleOptions()
    cfg, devices, T = instance.cfg, instance.devices, instance.T
    d = np.empty(len(devices))
    for k, (dev, o) in enumerate(zip(devices, instance.crs, strict=True)):
        try:
            d[k] = device_threshold(cfg, dev, o, epsilon2)
        except UnsatisfiableError as err:
            return P4Solution.infeasible(
                InfeasibilityReason.UNSATISFIABLE, f"device {k} at o={o:.4g}: {err}"
            )
    s, e, reason = time_budget(cfg, devices, T)
    if reason is not None:
        return P4Solution.infeasible(reason, f"T={T:.6g} s")
    b = np.array(
        [
            transmit_load(cfg, dev, o, dk)
            for dev, o, dk in zip(devices, instance.crs, d, strict=True)
        ]
    )
    lower = e / s

    best_f, best_value = None, math.inf
    for f0 in _starting_points(lower, cfg.edge_cpu, opts):
        f, value = _descent(f0, b, s, e, lower, opts)
        if value < best_value:
            best_f, best_value = f, value

    f_c = best_f
    tau = b / (s - e / f_c)
    # equal for every device at the optimum
    mu = float(np.mean(_marginal_rate(f_c, b, s, e)))
    return P4Solution(
        status=P4Status.FEASIBLE,
        d=d,
        g=d.copy(),
        tau=tau,
        f_c=f_c,
        sum_tau=float(np.sum(tau)),
        mu_star=mu,
        t_l=T - s,
        t_t=b / tau,
        t_c=e / f_c,
    )


def brute_force_p3(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    T: float,
    opts: OracleOptions | None = None,
    epsilon2: float = DEFAULT_EPSILON2,
) -> tuple[tuple[int, ...] | None, float]:
    """Enumerate every compression ratio tuple with the numerical solver.

    Returns
    -------
    tuple
        Catalog indices of the tuple with the smallest total time share (the
        lexicographically first on ties) and that share. ``(None, inf)`` if
        no tuple is feasible.

    Raises
    ------
    OracleRefusalError
        If more than ``BRUTE_FORCE_GUARD`` tuples would be enumerated.
    """
    opts = opts or OracleOptions()
    K, N = len(devices), len(cfg.cr_catalog)
    if N**K > BRUTE_FORCE_GUARD:
        raise OracleRefusalError(
            f"{N}^{K} compression ratio tuples exceed the guard of {BRUTE_FORCE_GUARD}."
        )
    best_idx, best_value = None, math.inf
    for idx in itertools.product(range(N), repeat=K):
        crs = tuple(cfg.cr_catalog[n] for n in idx)
        sol = oracle_solve_p4(P4Instance(cfg, tuple(devices), crs, T), opts, epsilon2)
        if sol.feasible and sol.sum_tau < best_value:
            best_idx, best_value = idx, sol.sum_tau
    return best_idx, best_value
