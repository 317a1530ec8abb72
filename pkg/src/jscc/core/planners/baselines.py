"""Equal share baselines."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from ..kkt import ThresholdTable, threshold_table
from ..system import DeviceProfile, SystemConfig
from .base import BasePlanner, PlanReport, PlanStatus, SolverOptions, WorkCounters

#: Truncation threshold imposed by the fixed threshold baseline.
FIXED_THRESHOLD = 0.5


class EqualSharePlanner(BasePlanner):
    """Time shares and edge CPU split equally between the devices.

    Subclasses only choose the compression ratio and threshold of each device.
    """

    def choose(self, table: ThresholdTable, k: int) -> tuple[int, float] | None:
        """Catalog index and threshold of device ``k``, None if unsatisfiable."""
        raise NotImplementedError

    def plan(self, cfg: SystemConfig, devices: Sequence[DeviceProfile]) -> PlanReport:
        """Evaluate the equal share allocation."""
        table = threshold_table(cfg, devices, self.options.epsilon2)
        counters = WorkCounters(threshold_solves=table.n_solves)
        K = len(devices)
        idx, g = [], []
        for k in range(K):
            choice = self.choose(table, k)
            if choice is None:
                self.log.warning("Device %d is unsatisfiable for %s", k, self.strategy)
                return PlanReport(
                    strategy=self.strategy,
                    status=PlanStatus.UNSATISFIABLE,
                    counters=counters,
                    message=f"device {k} cannot meet SSIM {devices[k].ssim_req}",
                )
            idx.append(choice[0])
            g.append(choice[1])
        allocation = self._allocation(
            cfg, devices, idx, g, [1 / K] * K, [cfg.edge_cpu / K] * K
        )
        return PlanReport(
            strategy=self.strategy,
            status=PlanStatus.SUCCESS,
            system_delay=allocation.max_latency,
            allocation=allocation,
            counters=counters,
            cr_indices=tuple(idx),
        )


class EqualPlanner(EqualSharePlanner):
    """EQU: each device picks the ratio and threshold minimizing its delay."""

    __planner_name__ = "EQU"

    def choose(self, table: ThresholdTable, k: int) -> tuple[int, float] | None:
        """Best scored ratio at its minimum threshold."""
        if not np.isfinite(table.score[k]).any():
            return None
        n = int(np.argmin(table.score[k]))
        return n, float(table.d[k, n])


class FixedRatioPlanner(EqualSharePlanner):
    """FIX_O: largest compression ratio, minimum threshold."""

    __planner_name__ = "FIX_O"

    def choose(self, table: ThresholdTable, k: int) -> tuple[int, float] | None:
        """Largest ratio at its minimum threshold."""
        d = float(table.d[k, 0])
        if math.isnan(d):
            return None
        return 0, d


class FixedThresholdPlanner(EqualSharePlanner):
    """FIX_G: largest compression ratio, threshold fixed to 0.5.

    The threshold is raised to the minimum one when 0.5 would violate the
    SSIM requirement.
    """

    __planner_name__ = "FIX_G"

    def choose(self, table: ThresholdTable, k: int) -> tuple[int, float] | None:
        """Largest ratio at the fixed threshold."""
        d = float(table.d[k, 0])
        if math.isnan(d):
            return None
        return 0, max(FIXED_THRESHOLD, d)


def solve_equ(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    opts: SolverOptions | None = None,
) -> PlanReport:
    """Equal shares with optimized compression ratios and thresholds."""
    return EqualPlanner(options=opts or SolverOptions()).plan(cfg, devices)


def solve_fix_o(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    opts: SolverOptions | None = None,
) -> PlanReport:
    """Equal shares with the largest compression ratio."""
    return FixedRatioPlanner(options=opts or SolverOptions()).plan(cfg, devices)


def solve_fix_g(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    opts: SolverOptions | None = None,
) -> PlanReport:
    """Equal shares with the largest compression ratio and a fixed threshold."""
    return FixedThresholdPlanner(options=opts or SolverOptions()).plan(cfg, devices)
