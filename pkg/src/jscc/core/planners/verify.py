"""Independent validation of a plan against every constraint."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from ..exceptions import DomainError
from ..model import end_to_end_latency, received_snr_db, ssim_model
from ..system import DeviceProfile, SystemConfig
from .base import PlanReport

VERIFY_TOL = 1e-9


@dataclass(frozen=True)
class ConstraintCheck:
    """Outcome of one constraint."""

    passed: bool
    value: float
    bound: float
    detail: str = ""


@dataclass
class Verdict:
    """Per constraint results of :func:`verify_report`."""

    checks: dict[str, ConstraintCheck] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """True if every constraint holds."""
        return bool(self.checks) and all(c.passed for c in self.checks.values())

    @property
    def failures(self) -> list[str]:
        """Names of the violated constraints."""
        return [name for name, c in self.checks.items() if not c.passed]


def verify_report(
    cfg: SystemConfig, devices: Sequence[DeviceProfile], report: PlanReport
) -> Verdict:
    """Re-check a plan from scratch with the closed-form model.

    Checked constraints: ``ssim`` (every device reaches its SSIM target at the
    achieved SNR), ``time_share`` (shares fit one frame), ``edge_cpu`` (edge
    budget), ``threshold`` (non-negative thresholds), ``ratio`` (ratios from
    the catalog), ``nonnegative`` (shares) and ``delay`` (recomputed latencies
    stay below the reported system delay).
    """
    verdict = Verdict()
    alloc = report.allocation
    if alloc is None or len(alloc) != len(devices):
        verdict.checks["allocation"] = ConstraintCheck(
            False, math.nan, math.nan, "missing or mis-sized allocation"
        )
        return verdict

    margins = []
    for dev, row in zip(devices, alloc, strict=True):
        try:
            params = cfg.logistic_for(row.o)
            ssim = ssim_model(params, received_snr_db(cfg, dev, row.g))
        except DomainError:
            ssim = -math.inf
        margins.append(ssim - dev.ssim_req)
    worst = min(margins)
    verdict.checks["ssim"] = ConstraintCheck(worst >= -VERIFY_TOL, worst, 0.0)

    verdict.checks["time_share"] = ConstraintCheck(
        alloc.sum_tau <= 1 + VERIFY_TOL, alloc.sum_tau, 1.0
    )
    verdict.checks["edge_cpu"] = ConstraintCheck(
        alloc.sum_fc <= cfg.edge_cpu * (1 + VERIFY_TOL), alloc.sum_fc, cfg.edge_cpu
    )
    min_g = float(alloc.column("g").min())
    verdict.checks["threshold"] = ConstraintCheck(min_g >= 0, min_g, 0.0)

    unknown = []
    for row in alloc:
        try:
            cfg.cr_index(row.o)
        except DomainError:
            unknown.append(row.o)
    verdict.checks["ratio"] = ConstraintCheck(
        not unknown, float(len(unknown)), 0.0, f"not in catalog: {unknown}" if unknown else ""
    )

    min_share = min(float(alloc.column("tau").min()), float(alloc.column("f_c").min()))
    verdict.checks["nonnegative"] = ConstraintCheck(min_share >= 0, min_share, 0.0)

    try:
        delay = max(
            end_to_end_latency(cfg, dev, row) for dev, row in zip(devices, alloc, strict=True)
        )
    except DomainError as e:
        verdict.checks["delay"] = ConstraintCheck(False, math.nan, report.system_delay, str(e))
    else:
        verdict.checks["delay"] = ConstraintCheck(
            delay <= report.system_delay * (1 + VERIFY_TOL), delay, report.system_delay
        )
    return verdict
