"""Planner interface, plan reports and the bisection driver."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from typing import Any, ClassVar

import numpy as np
from numpy.typing import NDArray
from typing_extensions import dataclass_transform

from ..._meta import MetaDCRegister, NoCaseEnum
from ..allocation import Allocation
from ..exceptions import InfeasibleError, UnsatisfiableError
from ..kkt import (
    P4Solution,
    ThresholdTable,
    solve_p4_loads,
    threshold_table,
    time_budget,
)
from ..model import local_latency, make_row
from ..special import DEFAULT_EPSILON2
from ..system import DeviceProfile, SystemConfig


class Strategy(NoCaseEnum):
    """Planning strategies."""

    OPT = "OPT"
    HEU = "HEU"
    EQU = "EQU"
    FIX_O = "FIX_O"
    FIX_G = "FIX_G"


class PlanStatus(NoCaseEnum):
    """Outcome of a plan."""

    SUCCESS = "success"
    INFEASIBLE = "infeasible"
    UNSATISFIABLE = "unsatisfiable"


@dataclass
class SolverOptions:
    """Tolerances and limits of the planners."""

    epsilon: float = 1e-3
    """Relative tolerance of the bisection on the system delay."""
    epsilon2: float = DEFAULT_EPSILON2
    """Relative tolerance of the threshold bisection."""
    max_outer_iters: int = 200
    n_jobs: int = 1
    """Parallelism hint, results do not depend on it."""

    def __post_init__(self) -> None:
        """Validate the options."""
        if not 0 < self.epsilon < 1 or not 0 < self.epsilon2 < 1:
            raise ValueError("epsilon and epsilon2 must lie in (0, 1).")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1.")


@dataclass(frozen=True)
class TraceProbe:
    """One probe of the bisection."""

    T: float
    feasible: bool
    sum_tau: float


@dataclass
class WorkCounters:
    """Work done by a planner."""

    p4_solves: int = 0
    cr_tuples: int = 0
    threshold_solves: int = 0


@dataclass
class PlanReport:
    """Result of a planner."""

    strategy: Strategy
    status: PlanStatus
    system_delay: float = math.nan
    allocation: Allocation | None = None
    trace: list[TraceProbe] = field(default_factory=list)
    counters: WorkCounters = field(default_factory=WorkCounters)
    cr_indices: tuple[int, ...] = ()
    bounds: tuple[float, float] = (math.nan, math.nan)
    message: str = ""

    @property
    def ok(self) -> bool:
        """True on success."""
        return self.status is PlanStatus.SUCCESS

    def to_dict(self) -> dict[str, Any]:
        """Serializable form with stable field names."""
        return {
            "strategy": self.strategy.value,
            "status": self.status.value,
            "system_delay_s": self.system_delay,
            "cr_indices": list(self.cr_indices),
            "bounds_s": list(self.bounds),
            "message": self.message,
            "allocation": self.allocation.to_dict() if self.allocation else None,
            "trace": [asdict(p) for p in self.trace],
            "counters": asdict(self.counters),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PlanReport:
        """Rebuild a report from :meth:`to_dict` output."""
        return cls(
            strategy=Strategy[data["strategy"]],
            status=PlanStatus(data["status"]),
            system_delay=float(data["system_delay_s"]),
            allocation=(
                Allocation.from_dict(data["allocation"]) if data["allocation"] else None
            ),
            trace=[TraceProbe(**p) for p in data.get("trace", [])],
            counters=WorkCounters(**data.get("counters", {})),
            cr_indices=tuple(data.get("cr_indices", ())),
            bounds=tuple(data.get("bounds_s", (math.nan, math.nan))),
            message=data.get("message", ""),
        )


@dataclass_transform(kw_only_default=True)
class MetaPlanner(MetaDCRegister):
    """MetaClass for planners."""

    dunder_name: ClassVar[str] = "planner"


class BasePlanner(metaclass=MetaPlanner):
    """Planner interface.

    A planner turns a system and its devices into a :class:`PlanReport`.
    """

    __registry__: ClassVar[dict[str, type[BasePlanner]]]
    __planner_name__: ClassVar[str]
    log: ClassVar[logging.Logger]

    options: SolverOptions = field(default_factory=SolverOptions)

    @property
    def strategy(self) -> Strategy:
        """Strategy tag of the planner."""
        return Strategy[self.__planner_name__]

    def plan(self, cfg: SystemConfig, devices: Sequence[DeviceProfile]) -> PlanReport:
        """Compute an allocation."""
        raise NotImplementedError

    def _allocation(
        self,
        cfg: SystemConfig,
        devices: Sequence[DeviceProfile],
        idx: Sequence[int],
        g: Sequence[float],
        tau: Sequence[float],
        f_c: Sequence[float],
    ) -> Allocation:
        return Allocation(
            tuple(
                make_row(cfg, dev, cfg.cr_catalog[n], gk, tk, fk)
                for dev, n, gk, tk, fk in zip(devices, idx, g, tau, f_c, strict=True)
            )
        )


def init_bounds(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    table: ThresholdTable | None = None,
    epsilon2: float = DEFAULT_EPSILON2,
) -> tuple[float, float]:
    """Bracket the optimal system delay.

    The upper bound splits both resources equally, the lower bound gives all
    of them to each device in turn. Both use the compression ratio with the
    smallest transmission load for every device.

    Raises
    ------
    UnsatisfiableError
        If a device has no usable compression ratio.
    """
    if table is None:
        table = threshold_table(cfg, devices, epsilon2)
    usable = table.satisfiable()
    if not np.all(usable):
        k = int(np.argmin(usable))
        raise UnsatisfiableError(
            f"Device {k} cannot reach SSIM {devices[k].ssim_req} with any"
            " compression ratio.",
            device=k,
        )
    K = len(devices)
    best_load = np.min(table.loads, axis=1)
    local = np.array([local_latency(cfg, dev) for dev in devices])
    decode = np.array([dev.image_count * cfg.decode_cycles for dev in devices])
    t_max = float(np.max(local + K * best_load + K * decode / cfg.edge_cpu))
    t_min = float(np.max(local + best_load + decode / cfg.edge_cpu))
    return t_min, t_max


@dataclass(frozen=True)
class Candidate:
    """Best compression ratio tuple at one probe."""

    idx: tuple[int, ...]
    solution: P4Solution


class BisectionPlanner(BasePlanner):
    """Bisection over the system delay around a feasibility test."""

    def select(
        self,
        cfg: SystemConfig,
        devices: Sequence[DeviceProfile],
        table: ThresholdTable,
        s: NDArray,
        e: NDArray,
        counters: WorkCounters,
    ) -> tuple[int, ...] | None:
        """Choose the compression ratio tuple tested at one probe."""
        raise NotImplementedError

    def probe(
        self,
        cfg: SystemConfig,
        devices: Sequence[DeviceProfile],
        table: ThresholdTable,
        T: float,
        counters: WorkCounters | None = None,
    ) -> tuple[bool, Candidate | None]:
        """Test whether the system delay ``T`` is achievable."""
        counters = counters if counters is not None else WorkCounters()
        s, e, reason = time_budget(cfg, devices, T)
        if reason is not None:
            self.log.debug("T=%.6g infeasible: %s", T, reason.value)
            return False, None
        idx = self.select(cfg, devices, table, s, e, counters)
        if idx is None:
            return False, None
        rows = np.arange(len(idx))
        sol = solve_p4_loads(
            cfg, devices, table.d[rows, idx], table.loads[rows, idx], T
        )
        return sol.fits_frame, Candidate(idx=idx, solution=sol)

    def p3_feasible(
        self,
        cfg: SystemConfig,
        devices: Sequence[DeviceProfile],
        T: float,
        table: ThresholdTable | None = None,
    ) -> bool:
        """True if the devices can all finish within ``T``."""
        if table is None:
            table = threshold_table(cfg, devices, self.options.epsilon2)
        return self.probe(cfg, devices, table, T)[0]

    def feasibility_profile(
        self,
        cfg: SystemConfig,
        devices: Sequence[DeviceProfile],
        grid: Sequence[float],
    ) -> NDArray:
        """Feasibility indicator over a sorted grid of system delays."""
        table = threshold_table(cfg, devices, self.options.epsilon2)
        return np.array([self.p3_feasible(cfg, devices, T, table) for T in grid])

    def plan(self, cfg: SystemConfig, devices: Sequence[DeviceProfile]) -> PlanReport:
        """Run the bisection on the system delay."""
        opts = self.options
        counters = WorkCounters()
        table = threshold_table(cfg, devices, opts.epsilon2)
        counters.threshold_solves = table.n_solves
        t_min, t_max = init_bounds(cfg, devices, table)
        bounds = (t_min, t_max)
        self.log.info(
            "Bisection over T in [%.6g, %.6g] s for %d devices", t_min, t_max, len(devices)
        )
        trace: list[TraceProbe] = []

        def _probe(T: float) -> tuple[bool, Candidate | None]:
            ok, cand = self.probe(cfg, devices, table, T, counters)
            sum_tau = cand.solution.sum_tau if cand else math.inf
            trace.append(TraceProbe(T=T, feasible=ok, sum_tau=sum_tau))
            return ok, cand

        ok, best = _probe(t_max)
        if not ok or best is None:
            raise InfeasibleError(f"Infeasible at the upper bound T={t_max:.6g} s", trace)

        n_iter = 0
        while t_max - t_min > opts.epsilon * t_max:
            n_iter += 1
            if n_iter > opts.max_outer_iters:
                raise InfeasibleError(
                    f"Bisection did not converge in {opts.max_outer_iters} iterations",
                    trace,
                )
            T = (t_min + t_max) / 2
            ok, cand = _probe(T)
            if ok:
                t_max, best = T, cand
            else:
                t_min = T
            self.log.debug("probe T=%.9g feasible=%s", T, ok)

        sol = best.solution
        allocation = self._allocation(cfg, devices, best.idx, sol.g, sol.tau, sol.f_c)
        self.log.info(
            "%s converged to T=%.6g s after %d probes",
            self.__planner_name__,
            t_max,
            len(trace),
        )
        return PlanReport(
            strategy=self.strategy,
            status=PlanStatus.SUCCESS,
            system_delay=allocation.max_latency,
            allocation=allocation,
            trace=trace,
            counters=counters,
            cr_indices=tuple(int(i) for i in best.idx),
            bounds=bounds,
        )


# short alias
P = BasePlanner.__registry__


def list_planners() -> list[str]:
    """List all available planners."""
    return list(P.keys())


def get_planner(name: str | Strategy) -> type[BasePlanner]:
    """Get a planner class from its strategy name (case insensitive)."""
    return BasePlanner.lookup(name.value if isinstance(name, Strategy) else name)
