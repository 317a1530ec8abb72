"""Sweeps comparing the planners, written as CSV tables and SVG plots."""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from jscc.core.exceptions import InfeasibleError, JSCCError, UnsatisfiableError
from jscc.core.parallel import run_parallel
from jscc.core.planners import (
    PlanStatus,
    SolverOptions,
    Strategy,
    get_planner,
    verify_report,
)
from jscc.core.special import DEFAULT_EPSILON2

from ..plotting import line_plot
from .scenario import ScenarioSpec, generate_scenario

log = logging.getLogger(__name__)

FIGURES = ("fig3", "fig4", "fig5")
DEFAULT_SWEEPS: dict[str, tuple[float, ...]] = {
    "fig3": (2, 3, 4, 5, 6, 7, 8),
    "fig4": (100, 200, 300, 400, 500),
    "fig5": (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0),
}
#: Local CPU of devices 2 to 5 in the edge share sweep, in GHz.
FIG5_PEERS_GHZ = (1.5, 2.0, 2.5, 3.0)
FIG5_EPSILON = 1e-5
FIG5_DEVICE = {"image_count": 5, "ssim_req": 0.85, "distance_m": 50.0}

SWEEP_COLUMN = {"fig3": "K", "fig4": "edge_cpu_percent", "fig5": "f1_local_ghz"}
DELAY_COLUMNS = ["strategy", "mean_delay_s", "stderr", "status"]
SHARE_COLUMNS = ["strategy", "device", "edge_share", "status"]

#: Relative slack of the mean curve ordering checks.
ORDERING_RTOL = 1e-3
HEU_GAP = 0.05


@dataclass
class FigureJob:
    """One figure sweep."""

    figure: str = "fig3"
    sweep: list[float] = field(default_factory=list)
    """Swept values; empty means the default sweep of the figure."""
    trials: int = 20
    strategies: list[str] = field(default_factory=lambda: [s.name for s in Strategy])
    seed: int = 0
    K: int = 5
    """Number of devices when the sweep is not over it."""
    epsilon: float = 1e-3
    epsilon2: float = DEFAULT_EPSILON2
    system: dict[str, Any] = field(default_factory=dict)
    out_dir: str = "."
    n_jobs: int = 1
    plot: bool = True

    def __post_init__(self) -> None:
        """Validate the job and fill the default sweep."""
        if self.figure not in FIGURES:
            raise ValueError(f"Unknown figure {self.figure}, available are {FIGURES}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1.")
        self.strategies = [Strategy[s].name for s in self.strategies]
        if not self.sweep:
            self.sweep = list(DEFAULT_SWEEPS[self.figure])
        self.sweep = sorted(float(x) for x in self.sweep)
        if self.figure == "fig5":
            self.K = 1 + len(FIG5_PEERS_GHZ)


@dataclass
class FigureResult:
    """Aggregated table of a figure and its ordering checks."""

    table: pd.DataFrame
    trials: pd.DataFrame
    checks: dict[str, bool] = field(default_factory=dict)
    csv_path: Path | None = None
    svg_path: Path | None = None

    @property
    def passed(self) -> bool:
        """True if every check holds."""
        return all(self.checks.values())


def _scenario(job: FigureJob, x: float, trial: int) -> ScenarioSpec:
    if job.figure == "fig3":
        return ScenarioSpec(K=int(x), seed=job.seed, trial=trial, system=dict(job.system))
    if job.figure == "fig4":
        return ScenarioSpec(
            K=job.K,
            seed=job.seed,
            trial=trial,
            system={**job.system, "edge_cpu": f"{x:g}%"},
        )
    return ScenarioSpec(
        K=job.K,
        seed=job.seed,
        trial=trial,
        system=dict(job.system),
        device_defaults=dict(FIG5_DEVICE),
        devices=[{"local_cpu_hz": f * 1e9} for f in (x, *FIG5_PEERS_GHZ)],
    )


def _status_of(error: JSCCError) -> str:
    if isinstance(error, UnsatisfiableError):
        return PlanStatus.UNSATISFIABLE.value
    if isinstance(error, InfeasibleError):
        return PlanStatus.INFEASIBLE.value
    return "error"


def _run_cell(cell: tuple[float, int], job: FigureJob) -> list[dict[str, Any]]:
    """Plan one scenario of the sweep with every strategy."""
    x, trial = cell
    cfg, devices = generate_scenario(_scenario(job, x, trial))
    epsilon = min(job.epsilon, FIG5_EPSILON) if job.figure == "fig5" else job.epsilon
    opts = SolverOptions(epsilon=epsilon, epsilon2=job.epsilon2)
    rows = []
    for name in job.strategies:
        row: dict[str, Any] = {"x": x, "trial": trial, "strategy": name}
        try:
            report = get_planner(name)(options=opts).plan(cfg, devices)
        except JSCCError as e:
            log.warning("%s failed at %s=%g (trial %d): %s", name, job.figure, x, trial, e)
            row.update(delay=math.nan, status=_status_of(e), shares=None)
            rows.append(row)
            continue
        status = report.status.value
        if report.ok:
            verdict = verify_report(cfg, devices, report)
            if not verdict.passed:
                log.warning("%s allocation violates %s", name, verdict.failures)
                status = "invalid"
        ok = status == PlanStatus.SUCCESS.value
        row.update(
            delay=report.system_delay if ok else math.nan,
            status=status,
            shares=report.allocation.column("f_c") / cfg.edge_cpu if ok else None,
        )
        rows.append(row)
    return rows


def _aggregate(raw: pd.DataFrame, job: FigureJob) -> pd.DataFrame:
    records = []
    for x in job.sweep:
        for name in job.strategies:
            group = raw[(raw["x"] == x) & (raw["strategy"] == name)]
            ok = group["status"] == PlanStatus.SUCCESS.value
            delays = group.loc[ok, "delay"].to_numpy()
            n = len(delays)
            if n == len(group):
                status = PlanStatus.SUCCESS.value
            elif n:
                status = "partial"
            else:
                status = str(group["status"].iloc[0])
            records.append(
                {
                    SWEEP_COLUMN[job.figure]: int(x) if job.figure == "fig3" else x,
                    "strategy": name,
                    "mean_delay_s": float(delays.mean()) if n else math.nan,
                    "stderr": float(delays.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan,
                    "status": status,
                }
            )
    return pd.DataFrame.from_records(records, columns=[SWEEP_COLUMN[job.figure], *DELAY_COLUMNS])


def _shares(raw: pd.DataFrame, job: FigureJob) -> pd.DataFrame:
    records = []
    for row in raw[raw["trial"] == 0].itertuples():
        for k in range(job.K):
            records.append(
                {
                    "f1_local_ghz": row.x,
                    "strategy": row.strategy,
                    "device": k + 1,
                    "edge_share": float(row.shares[k]) if row.shares is not None else math.nan,
                    "status": row.status,
                }
            )
    table = pd.DataFrame.from_records(records, columns=["f1_local_ghz", *SHARE_COLUMNS])
    order = {name: i for i, name in enumerate(job.strategies)}
    return table.sort_values(
        ["f1_local_ghz", "strategy", "device"], key=lambda c: c.map(order) if c.name == "strategy" else c
    ).reset_index(drop=True)


def _mean_curve(table: pd.DataFrame, job: FigureJob, name: str) -> np.ndarray:
    rows = table[table["strategy"] == name].sort_values(SWEEP_COLUMN[job.figure])
    return rows["mean_delay_s"].to_numpy()


def _delay_checks(raw: pd.DataFrame, table: pd.DataFrame, job: FigureJob) -> dict[str, bool]:
    checks: dict[str, bool] = {}
    if "OPT" not in job.strategies:
        return checks
    opt = raw[raw["strategy"] == "OPT"].set_index(["x", "trial"])["delay"]
    for name in job.strategies:
        if name == "OPT":
            continue
        other = raw[raw["strategy"] == name].set_index(["x", "trial"])["delay"]
        both = pd.concat([opt, other], axis=1, keys=["opt", "other"]).dropna()
        checks[f"opt_le_{name.lower()}"] = bool(
            np.all(both["opt"] <= both["other"] * (1 + job.epsilon))
        )
    curve = _mean_curve(table, job, "OPT")
    steps = np.diff(curve)
    slack = ORDERING_RTOL * curve[1:]
    if job.figure == "fig3":
        checks["opt_nondecreasing"] = bool(np.all(steps >= -slack))
    else:
        checks["opt_nonincreasing"] = bool(np.all(steps <= slack))
    if "HEU" in job.strategies:
        heu = _mean_curve(table, job, "HEU")
        checks["heu_within_5pct"] = bool(np.all(heu <= curve * (1 + HEU_GAP)))
    return checks


def _share_checks(table: pd.DataFrame, job: FigureJob) -> dict[str, bool]:
    checks: dict[str, bool] = {}
    if "OPT" not in job.strategies:
        return checks
    opt = table[table["strategy"] == "OPT"].pivot(
        index="f1_local_ghz", columns="device", values="edge_share"
    )
    steps = np.diff(opt.to_numpy(), axis=0)
    checks["device1_share_decreasing"] = bool(np.all(steps[:, 0] < 0))
    checks["peer_shares_nondecreasing"] = bool(np.all(steps[:, 1:] >= -1e-9))
    checks["shares_sum_to_one"] = bool(np.allclose(opt.sum(axis=1), 1.0, rtol=0, atol=1e-9))
    return checks


def run_figure(job: FigureJob) -> FigureResult:
    """Run a figure sweep and write its CSV table and SVG plot."""
    trials = 1 if job.figure == "fig5" else job.trials
    cells = [(x, t) for x in job.sweep for t in range(trials)]
    log.info("%s: %d sweep points x %d trials", job.figure, len(job.sweep), trials)
    results = run_parallel(_run_cell, cells, job.n_jobs, job, progress=job.figure)
    raw = pd.DataFrame.from_records(
        [row for rows in results for row in rows],
        columns=["x", "trial", "strategy", "delay", "status", "shares"],
    )

    if job.figure == "fig5":
        table = _shares(raw, job)
        checks = _share_checks(table, job)
    else:
        table = _aggregate(raw, job)
        checks = _delay_checks(raw, table, job)
    for name, ok in checks.items():
        (log.info if ok else log.warning)("%s check %s: %s", job.figure, name, ok)

    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{job.figure}.csv"
    table.to_csv(csv_path, index=False, float_format="%.12g")
    svg_path = None
    if job.plot:
        svg_path = _plot(table, job, out_dir / f"{job.figure}.svg")
    return FigureResult(
        table=table,
        trials=raw.drop(columns="shares"),
        checks=checks,
        csv_path=csv_path,
        svg_path=svg_path,
    )


def _plot(table: pd.DataFrame, job: FigureJob, filename: Path) -> Path:
    if job.figure == "fig5":
        opt = table[table["strategy"] == "OPT"].assign(
            device=lambda t: "device " + t["device"].astype(str)
        )
        return line_plot(
            opt,
            "f1_local_ghz",
            "edge_share",
            "device",
            filename,
            xlabel="Local CPU of device 1 (GHz)",
            ylabel="Edge CPU share",
        )
    xlabel = {"fig3": "Number of devices", "fig4": "Edge CPU (% of one core)"}[job.figure]
    return line_plot(
        table,
        SWEEP_COLUMN[job.figure],
        "mean_delay_s",
        "strategy",
        filename,
        xlabel=xlabel,
        ylabel="System delay (s)",
        yerr="stderr",
    )


def run_fig3(job: FigureJob) -> FigureResult:
    """System delay against the number of devices."""
    return run_figure(dataclasses.replace(job, figure="fig3", sweep=_keep(job, "fig3")))


def run_fig4(job: FigureJob) -> FigureResult:
    """System delay against the edge CPU budget."""
    return run_figure(dataclasses.replace(job, figure="fig4", sweep=_keep(job, "fig4")))


def run_fig5(job: FigureJob) -> FigureResult:
    """Edge CPU shares against the local CPU of the first device."""
    return run_figure(dataclasses.replace(job, figure="fig5", sweep=_keep(job, "fig5")))


def _keep(job: FigureJob, figure: str) -> list[float]:
    """Keep the sweep of the job only if it was meant for ``figure``."""
    return list(job.sweep) if job.figure == figure else []


FIGURE_RUNNERS = {"fig3": run_fig3, "fig4": run_fig4, "fig5": run_fig5}
