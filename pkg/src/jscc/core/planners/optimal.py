"""Exhaustive search over compression ratio tuples."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from ..kkt import ThresholdTable, sum_tau_batch
from ..parallel import run_parallel
from ..system import DeviceProfile, SystemConfig
from .base import BisectionPlanner, PlanReport, SolverOptions, WorkCounters

#: Number of tuples evaluated per vectorized chunk.
CHUNK_SIZE = 1 << 16


def _chunk_argmin(
    bounds: tuple[int, int],
    loads: NDArray,
    s: NDArray,
    e: NDArray,
    edge_cpu: float,
) -> tuple[float, int]:
    """Best tuple of a range of flat indices.

    Flat indices follow the lexicographic order of catalog index tuples, the
    first device being the most significant digit.
    """
    K, N = loads.shape
    flat = np.arange(*bounds)
    idx = np.stack(np.unravel_index(flat, (N,) * K), axis=-1)
    tuple_loads = loads[np.arange(K), idx]
    with np.errstate(invalid="ignore"):
        sum_tau = sum_tau_batch(tuple_loads, s, e, edge_cpu)
    sum_tau = np.where(np.isnan(sum_tau), np.inf, sum_tau)
    best = int(np.argmin(sum_tau))
    return float(sum_tau[best]), int(flat[best])


class OptimalPlanner(BisectionPlanner):
    """OPT: every compression ratio tuple is solved at each probe.

    The tuple with the smallest total time share is kept, ties going to the
    lexicographically smallest catalog index tuple.
    """

    __planner_name__ = "OPT"

    def select(
        self,
        cfg: SystemConfig,
        devices: Sequence[DeviceProfile],
        table: ThresholdTable,
        s: NDArray,
        e: NDArray,
        counters: WorkCounters,
    ) -> tuple[int, ...] | None:
        """Return the tuple minimizing the total time share."""
        K, N = table.loads.shape
        total = N**K
        chunks = [(lo, min(lo + CHUNK_SIZE, total)) for lo in range(0, total, CHUNK_SIZE)]
        results = run_parallel(
            _chunk_argmin,
            chunks,
            self.options.n_jobs,
            table.loads,
            s,
            e,
            cfg.edge_cpu,
        )
        counters.p4_solves += total
        counters.cr_tuples += total
        value, flat = min(results)
        if math.isinf(value):
            return None
        return tuple(int(i) for i in np.unravel_index(flat, (N,) * K))


def solve_optimal(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    opts: SolverOptions | None = None,
) -> PlanReport:
    """Minimize the system delay with exhaustive compression ratio search."""
    return OptimalPlanner(options=opts or SolverOptions()).plan(cfg, devices)
