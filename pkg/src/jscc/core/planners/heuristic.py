"""Low complexity planner ranking compression ratios per device."""

from __future__ import annotations

from collections.abc import Sequence

from numpy.typing import NDArray

from ..kkt import ThresholdTable
from ..system import DeviceProfile, SystemConfig
from .base import BisectionPlanner, PlanReport, SolverOptions, WorkCounters


class HeuristicPlanner(BisectionPlanner):
    """HEU: each device keeps the ratio with the smallest :math:`o e^{d(o)}`.

    The ranking does not depend on the probed delay, so every probe costs a
    single closed-form solve.
    """

    __planner_name__ = "HEU"

    def select(
        self,
        cfg: SystemConfig,
        devices: Sequence[DeviceProfile],
        table: ThresholdTable,
        s: NDArray,
        e: NDArray,
        counters: WorkCounters,
    ) -> tuple[int, ...] | None:
        """Return the per-device best ranked tuple."""
        counters.p4_solves += 1
        counters.cr_tuples += 1
        if not table.satisfiable().all():
            return None
        return tuple(int(i) for i in table.best_index())


def solve_heuristic(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    opts: SolverOptions | None = None,
) -> PlanReport:
    """Minimize the system delay with per-device compression ratio ranking."""
    return HeuristicPlanner(options=opts or SolverOptions()).plan(cfg, devices)
