"""Closed-form resource allocation for fixed compression ratios.

With one compression ratio per device and a candidate system delay ``T``, the
problem of minimizing the total time share under the per-device delay
constraints and the edge CPU budget is convex. Its KKT conditions give every
threshold at its lower bound ``d_k`` and

.. math::

    f_k^c = \\frac{\\sqrt{b_k e_k / \\mu} + e_k}{s_k}, \\quad
    \\tau_k = \\frac{b_k + \\sqrt{\\mu b_k e_k}}{s_k}, \\quad
    \\mu = \\left(\\frac{\\sum_k \\sqrt{b_k e_k}/s_k}{F^c - \\sum_k e_k/s_k}\\right)^2

where :math:`s_k = T - t_k^l` is the time left after local encoding,
:math:`b_k = L_k D_0 o_k e^{d_k} T_s / M` the transmission load and
:math:`e_k = L_k C^d` the decoding cycles of device ``k``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from .exceptions import UnsatisfiableError
from .model import device_threshold, local_latency, transmit_load
from .special import DEFAULT_EPSILON2
from .system import DeviceProfile, SystemConfig

log = logging.getLogger(__name__)

#: Relative tolerance of the delay and budget tightness checks.
TIGHTNESS_RTOL = 1e-9
#: Relative tolerance of comparisons against the numerical oracle.
ORACLE_RTOL = 1e-6
#: Slack allowed on the total time share when testing feasibility.
SUM_TAU_TOL = 1e-12


class P4Status(Enum):
    """Outcome of a fixed compression ratio solve."""

    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


class InfeasibilityReason(Enum):
    """Why no allocation meets the candidate delay."""

    UNSATISFIABLE = "unsatisfiable"
    """A device SSIM target is outside the range of its compression ratio."""
    NO_TIME_AFTER_LOCAL = "no_time_after_local"
    """``T`` does not exceed the local encoding delay of some device."""
    EDGE_CPU_SHORTFALL = "edge_cpu_shortfall"
    """The edge CPU cannot decode in time even with instant transmission."""

    @property
    def raise_t(self) -> bool:
        """True if a larger system delay may remove the infeasibility."""
        return self is not InfeasibilityReason.UNSATISFIABLE


@dataclass(frozen=True)
class P4Instance:
    """A candidate system delay with one compression ratio per device."""

    cfg: SystemConfig
    devices: tuple[DeviceProfile, ...]
    crs: tuple[float, ...]
    T: float

    def __post_init__(self) -> None:
        """Validate the instance."""
        object.__setattr__(self, "devices", tuple(self.devices))
        object.__setattr__(self, "crs", tuple(float(o) for o in self.crs))
        if not self.devices or len(self.devices) != len(self.crs):
            raise ValueError("devices and crs must be non-empty and of equal length.")
        if not self.T > 0:
            raise ValueError("T must be positive.")
        for o in self.crs:
            self.cfg.cr_index(o)


@dataclass(frozen=True)
class P4Solution:
    """Solution of a fixed compression ratio instance."""

    status: P4Status
    reason: InfeasibilityReason | None = None
    message: str = ""
    d: NDArray = field(default_factory=lambda: np.empty(0))
    g: NDArray = field(default_factory=lambda: np.empty(0))
    tau: NDArray = field(default_factory=lambda: np.empty(0))
    f_c: NDArray = field(default_factory=lambda: np.empty(0))
    sum_tau: float = math.inf
    mu_star: float = math.nan
    t_l: NDArray = field(default_factory=lambda: np.empty(0))
    t_t: NDArray = field(default_factory=lambda: np.empty(0))
    t_c: NDArray = field(default_factory=lambda: np.empty(0))

    @property
    def feasible(self) -> bool:
        """True if an allocation exists (regardless of the time share budget)."""
        return self.status is P4Status.FEASIBLE

    @property
    def fits_frame(self) -> bool:
        """True if the allocation also fits in one TDMA frame."""
        return self.feasible and self.sum_tau <= 1 + SUM_TAU_TOL

    @property
    def t_total(self) -> NDArray:
        """End-to-end latency of every device."""
        return self.t_l + self.t_t + self.t_c

    @classmethod
    def infeasible(cls, reason: InfeasibilityReason, message: str) -> P4Solution:
        """Build an infeasible verdict."""
        return cls(status=P4Status.INFEASIBLE, reason=reason, message=message)


def _lagrange_multiplier(weighted_root: NDArray, edge_slack: NDArray) -> NDArray:
    """Optimal multiplier of the edge CPU budget."""
    return (weighted_root / edge_slack) ** 2


def time_budget(
    cfg: SystemConfig, devices: Sequence[DeviceProfile], T: float
) -> tuple[NDArray, NDArray, InfeasibilityReason | None]:
    """Compute the time left after encoding and the decoding cycles.

    Returns ``(s, e, reason)`` where ``reason`` is set when ``T`` cannot be met
    whatever the compression ratios.
    """
    a = np.array([local_latency(cfg, dev) for dev in devices])
    e = np.array([dev.image_count * cfg.decode_cycles for dev in devices])
    s = T - a
    if np.any(s <= 0):
        return s, e, InfeasibilityReason.NO_TIME_AFTER_LOCAL
    if cfg.edge_cpu <= np.sum(e / s):
        return s, e, InfeasibilityReason.EDGE_CPU_SHORTFALL
    return s, e, None


def sum_tau_batch(loads: NDArray, s: NDArray, e: NDArray, edge_cpu: float) -> NDArray:
    """Optimal total time share for many compression ratio tuples at once.

    Parameters
    ----------
    loads: array of shape (..., K)
        Transmission loads ``b_k`` of each tuple; ``inf`` marks unsatisfiable
        entries.
    s, e: array of shape (K,)
        Time left after encoding and decoding cycles, from :func:`time_budget`.
    edge_cpu: float
        Edge CPU budget.
    """
    root = np.sqrt(loads * e)
    mu = _lagrange_multiplier(
        np.sum(root / s, axis=-1), edge_cpu - np.sum(e / s)
    )
    return np.sum((loads + np.sqrt(mu[..., None]) * root) / s, axis=-1)


def kkt_allocation(
    loads: NDArray, s: NDArray, e: NDArray, edge_cpu: float
) -> tuple[NDArray, NDArray, float]:
    """Closed-form time and edge CPU shares of one tuple.

    Returns ``(tau, f_c, mu)``.
    """
    root = np.sqrt(loads * e)
    mu = float(_lagrange_multiplier(np.sum(root / s), edge_cpu - np.sum(e / s)))
    sqrt_mu = math.sqrt(mu)
    tau = (loads + sqrt_mu * root) / s
    f_c = (root / sqrt_mu + e) / s
    return tau, f_c, mu


def solve_p4(instance: P4Instance, epsilon2: float = DEFAULT_EPSILON2) -> P4Solution:
    """Solve the fixed compression ratio problem in closed form.

    Parameters
    ----------
    instance: P4Instance
        Candidate delay and compression ratios.
    epsilon2: float
        Relative tolerance of the threshold bisection.

    Returns
    -------
    P4Solution
        Either the optimal allocation, or an infeasible verdict with its
        reason. A feasible solution fits the TDMA frame iff ``sum_tau <= 1``.
    """
    cfg, devices, T = instance.cfg, instance.devices, instance.T
    d = np.empty(len(devices))
    for k, (dev, o) in enumerate(zip(devices, instance.crs, strict=True)):
        try:
            d[k] = device_threshold(cfg, dev, o, epsilon2)
        except UnsatisfiableError as e:
            return P4Solution.infeasible(
                InfeasibilityReason.UNSATISFIABLE, f"device {k} at o={o:.4g}: {e}"
            )

    loads = np.array(
        [
            transmit_load(cfg, dev, o, dk)
            for dev, o, dk in zip(devices, instance.crs, d, strict=True)
        ]
    )
    return solve_p4_loads(cfg, devices, d, loads, T)


def solve_p4_loads(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    d: NDArray,
    loads: NDArray,
    T: float,
) -> P4Solution:
    """Closed-form solve from precomputed thresholds and transmission loads."""
    d = np.asarray(d, dtype=np.float64)
    loads = np.asarray(loads, dtype=np.float64)
    if not np.all(np.isfinite(loads)):
        return P4Solution.infeasible(
            InfeasibilityReason.UNSATISFIABLE, "unusable compression ratio"
        )
    s, e, reason = time_budget(cfg, devices, T)
    if reason is not None:
        return P4Solution.infeasible(reason, f"T={T:.6g} s")
    tau, f_c, mu = kkt_allocation(loads, s, e, cfg.edge_cpu)
    return P4Solution(
        status=P4Status.FEASIBLE,
        d=d,
        g=d.copy(),
        tau=tau,
        f_c=f_c,
        sum_tau=float(np.sum(tau)),
        mu_star=mu,
        t_l=T - s,
        t_t=loads / tau,
        t_c=e / f_c,
    )


def p4_objective_for_cr_choice(
    cfg: SystemConfig,
    dev: DeviceProfile,
    o: float,
    T: float | None = None,
    epsilon2: float = DEFAULT_EPSILON2,
) -> float:
    """Rank a compression ratio for one device by :math:`o e^{d(o)}`.

    The optimal time share of a device grows with this product, which does not
    depend on the candidate delay ``T``. Unsatisfiable ratios score ``inf``.
    """
    try:
        return o * math.exp(device_threshold(cfg, dev, o, epsilon2))
    except UnsatisfiableError:
        return math.inf


@dataclass(frozen=True)
class ThresholdTable:
    """Per (device, compression ratio) thresholds, shape (K, N).

    Unsatisfiable pairs hold ``nan`` thresholds and ``inf`` scores.
    """

    d: NDArray
    score: NDArray
    loads: NDArray
    """Transmission load at ``g = d`` (``inf`` if unsatisfiable)."""

    @property
    def n_solves(self) -> int:
        """Number of threshold bisections performed."""
        return int(np.sum(np.isfinite(self.d)))

    def best_index(self) -> NDArray:
        """Catalog index of the best score of each device, first one on ties."""
        return np.argmin(self.score, axis=1)

    def satisfiable(self) -> NDArray:
        """Mask of devices with at least one usable compression ratio."""
        return np.any(np.isfinite(self.score), axis=1)


def threshold_table(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    epsilon2: float = DEFAULT_EPSILON2,
) -> ThresholdTable:
    """Compute the minimum thresholds of every device and compression ratio."""
    K, N = len(devices), len(cfg.cr_catalog)
    d = np.full((K, N), np.nan)
    score = np.full((K, N), np.inf)
    loads = np.full((K, N), np.inf)
    for k, dev in enumerate(devices):
        for n, o in enumerate(cfg.cr_catalog):
            try:
                d[k, n] = device_threshold(cfg, dev, o, epsilon2)
            except UnsatisfiableError:
                continue
            score[k, n] = p4_objective_for_cr_choice(cfg, dev, o, epsilon2=epsilon2)
            loads[k, n] = transmit_load(cfg, dev, o, d[k, n])
    return ThresholdTable(d=d, score=score, loads=loads)
