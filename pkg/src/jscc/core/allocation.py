"""Resource allocation containers."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import asdict, dataclass, fields
from typing import Any

import numpy as np
import pandas as pd
from numpy.typing import NDArray

ALLOCATION_TOL = 1e-9


@dataclass(frozen=True)
class AllocationRow:
    """Decision and latency breakdown of one device."""

    o: float
    """Compression ratio."""
    g: float
    """Truncation threshold."""
    tau: float
    """TDMA time share."""
    f_c: float
    """Edge CPU share, in cycles/second."""
    t_l: float
    t_t: float
    t_c: float
    t_total: float


@dataclass(frozen=True)
class Allocation:
    """A complete decision for all devices."""

    rows: tuple[AllocationRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[AllocationRow]:
        return iter(self.rows)

    def __getitem__(self, k: int) -> AllocationRow:
        return self.rows[k]

    def column(self, name: str) -> NDArray:
        """Values of one field across devices."""
        return np.array([getattr(r, name) for r in self.rows], dtype=np.float64)

    @property
    def sum_tau(self) -> float:
        """Total time share."""
        return float(np.sum(self.column("tau")))

    @property
    def sum_fc(self) -> float:
        """Total edge CPU share."""
        return float(np.sum(self.column("f_c")))

    @property
    def max_latency(self) -> float:
        """System delay, the largest end-to-end latency."""
        return float(np.max(self.column("t_total")))

    def check_budget(self, edge_cpu: float, tol: float = ALLOCATION_TOL) -> bool:
        """Check both resource budgets and the latency decomposition."""
        consistent = all(
            np.isclose(r.t_total, r.t_l + r.t_t + r.t_c, rtol=tol, atol=0)
            for r in self.rows
        )
        return (
            self.sum_tau <= 1 + tol
            and self.sum_fc <= edge_cpu * (1 + tol)
            and consistent
        )

    def to_frame(self) -> pd.DataFrame:
        """Tabular view, one row per device."""
        return pd.DataFrame(
            [asdict(r) for r in self.rows], columns=[f.name for f in fields(AllocationRow)]
        )

    def to_dict(self) -> list[dict[str, Any]]:
        """Serializable form."""
        return [asdict(r) for r in self.rows]

    @classmethod
    def from_dict(cls, rows: list[dict[str, Any]]) -> Allocation:
        """Rebuild an allocation from :meth:`to_dict` output."""
        return cls(tuple(AllocationRow(**{k: float(v) for k, v in r.items()}) for r in rows))
