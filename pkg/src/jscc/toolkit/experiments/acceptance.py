"""Acceptance suites of the planning engine.

Each suite returns a list of :class:`Criterion`, a measured value checked
against a bound. Suites call the engine through module attributes, so a
patched function is what gets measured.
"""

from __future__ import annotations

import json
import logging
import math
import tempfile
import time
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from scipy.special import exp1

from jscc.core import channel, kkt, model, special
from jscc.core.fitting import anchor_params, fit_logistic, logistic_samples
from jscc.core.planners import (
    HeuristicPlanner,
    OptimalPlanner,
    SolverOptions,
    init_bounds,
)
from jscc.core.system import DeviceProfile, LogisticParams, SystemConfig

from ..oracle import (
    LatencyConstraint,
    OracleOptions,
    brute_force_p3,
    check_constraint_convexity,
    oracle_solve_p4,
    sample_interior,
)
from .figures import FigureJob, run_fig3, run_fig4, run_fig5
from .scenario import ScenarioSpec, generate_scenario

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Criterion:
    """One measured value against its bound."""

    suite: str
    name: str
    value: float
    bound: float
    passed: bool
    detail: str = ""


def _le(suite: str, name: str, value: float, bound: float, detail: str = "") -> Criterion:
    """Criterion ``value <= bound``; a NaN value fails."""
    return Criterion(suite, name, float(value), float(bound), bool(value <= bound), detail)


@dataclass
class AcceptanceOptions:
    """Sizes of the acceptance suites."""

    seed: int = 0
    epsilon: float = 1e-3
    trials: int = 20
    num_slots: int = 100_000
    n_jobs: int = 1
    out_dir: str | None = None
    """Where the figure suites write; a temporary directory if None."""


@dataclass
class AcceptanceReport:
    """Outcome of a run of the acceptance suites."""

    suite: str
    criteria: list[Criterion] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True if every criterion holds."""
        return bool(self.criteria) and all(c.passed for c in self.criteria)

    @property
    def failures(self) -> list[Criterion]:
        """Violated criteria."""
        return [c for c in self.criteria if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        """Serializable form, with stable field names."""
        return {
            "suite": self.suite,
            "passed": self.passed,
            "criteria": [asdict(c) for c in self.criteria],
        }

    def to_json(self) -> str:
        """JSON form; NaN values are written as null."""
        data = self.to_dict()
        for c in data["criteria"]:
            for key in ("value", "bound"):
                if not math.isfinite(c[key]):
                    c[key] = None if math.isnan(c[key]) else str(c[key])
        return json.dumps(data, indent=2)


def _runtime(suite: str, start: float, bound: float) -> Criterion:
    return _le(suite, "runtime_s", time.perf_counter() - start, bound)


def _random_instance(
    i: int, opts: AcceptanceOptions, max_k: int = 4
) -> tuple[SystemConfig, list[DeviceProfile], tuple[float, ...], float]:
    """Seeded scenario, compression ratio tuple and delay with a P4 solution."""
    K = 1 + i % max_k
    cfg, devices = generate_scenario(ScenarioSpec(K=K, seed=opts.seed, trial=i))
    rng = np.random.default_rng((opts.seed, i))
    table = kkt.threshold_table(cfg, devices)
    crs = []
    for k in range(K):
        usable = np.flatnonzero(np.isfinite(table.d[k]))
        crs.append(cfg.cr_catalog[int(rng.choice(usable))])
    _, t_max = init_bounds(cfg, devices, table)
    return cfg, devices, tuple(crs), t_max * rng.uniform(1.0, 2.0)


def suite_e1(opts: AcceptanceOptions) -> list[Criterion]:
    """E1 against adaptive quadrature and scipy."""
    start = time.perf_counter()
    grid = np.logspace(-6, math.log10(50), 200)
    ours = np.array([special.exp_integral_e1(g) for g in grid])
    quad = np.array([special.exp_integral_e1_quad(g) for g in grid])
    elapsed = time.perf_counter() - start
    return [
        _le("e1", "max_rel_error_vs_quadrature", np.max(np.abs(ours - quad) / quad), 1e-10),
        _le("e1", "max_rel_error_vs_scipy", np.max(np.abs(ours - exp1(grid)) / exp1(grid)), 1e-10),
        _le("e1", "runtime_s", elapsed, 1.0),
    ]


def suite_inverse(opts: AcceptanceOptions, n: int = 1000) -> list[Criterion]:
    """SSIM and E1 round trips through their inverses."""
    rng = np.random.default_rng((opts.seed, 2))
    catalog = SystemConfig().cr_catalog
    ssim_err = 0.0
    for _ in range(n):
        params = anchor_params(float(rng.choice(catalog)))
        eta = params.a1 + (params.a2 - params.a1) * rng.uniform(0.01, 0.99)
        gamma = model.required_snr_db(params, eta)
        ssim_err = max(ssim_err, abs(model.ssim_model(params, gamma) - eta))
    e1_err = 0.0
    for c in 10 ** rng.uniform(-10, 2.5, n):
        d = special.min_threshold(c)
        e1_err = max(e1_err, abs(special.exp_integral_e1(d) - c) / c)
    return [
        _le("inverse", "ssim_roundtrip_abs_error", ssim_err, 1e-9),
        _le("inverse", "e1_roundtrip_rel_error", e1_err, 1e-8),
    ]


def _stationarity(sol: kkt.P4Solution, b: np.ndarray, e: np.ndarray, edge_cpu: float, T: float) -> float:
    """Largest relative KKT residual of a closed-form solution."""
    lam = sol.tau**2 / b
    res_f = np.abs(sol.mu_star - lam * e / sol.f_c**2) / sol.mu_star
    res_t = np.abs(sol.t_total - T) / T
    res_budget = abs(np.sum(sol.f_c) - edge_cpu) / edge_cpu
    return float(max(res_f.max(), res_t.max(), res_budget))


def _p4_instances(opts: AcceptanceOptions, n: int = 50) -> list:
    out = []
    for i in range(n):
        cfg, devices, crs, T = _random_instance(i, opts)
        out.append(kkt.P4Instance(cfg, tuple(devices), crs, T))
    return out


def suite_kkt(opts: AcceptanceOptions, n: int = 50) -> list[Criterion]:
    """Closed form against the numerical oracle."""
    start = time.perf_counter()
    obj_gap = alloc_gap = residual = 0.0
    oracle_opts = OracleOptions(seed=opts.seed)
    for inst in _p4_instances(opts, n):
        sol = kkt.solve_p4(inst)
        ref = oracle_solve_p4(inst, oracle_opts)
        if not (sol.feasible and ref.feasible):
            return [Criterion("kkt", "feasible", math.nan, math.nan, False, sol.message)]
        obj_gap = max(obj_gap, abs(sol.sum_tau - ref.sum_tau) / ref.sum_tau)
        alloc_gap = max(
            alloc_gap,
            float(np.max(np.abs(sol.tau - ref.tau) / ref.tau)),
            float(np.max(np.abs(sol.f_c - ref.f_c) / ref.f_c)),
        )
        b = np.array(
            [model.transmit_load(inst.cfg, dev, o, d) for dev, o, d in zip(inst.devices, inst.crs, sol.d, strict=True)]
        )
        e = np.array([dev.image_count * inst.cfg.decode_cycles for dev in inst.devices])
        residual = max(residual, _stationarity(sol, b, e, inst.cfg.edge_cpu, inst.T))
    return [
        _le("kkt", "objective_rel_gap", obj_gap, 1e-6),
        _le("kkt", "allocation_rel_gap", alloc_gap, 1e-5),
        _le("kkt", "stationarity_residual", residual, 1e-7),
        _runtime("kkt", start, 60.0),
    ]


def suite_tightness(opts: AcceptanceOptions, n: int = 50) -> list[Criterion]:
    """Every constraint of a closed-form solution is active."""
    delay_gap = budget_gap = 0.0
    for inst in _p4_instances(opts, n):
        sol = kkt.solve_p4(inst)
        delay_gap = max(delay_gap, float(np.max(np.abs(sol.t_total - inst.T) / inst.T)))
        budget_gap = max(budget_gap, abs(np.sum(sol.f_c) - inst.cfg.edge_cpu) / inst.cfg.edge_cpu)
    return [
        _le("tightness", "latency_rel_gap", delay_gap, 1e-9),
        _le("tightness", "edge_cpu_rel_gap", budget_gap, 1e-9),
    ]


def suite_monotonicity(opts: AcceptanceOptions, n: int = 20, n_grid: int = 50) -> list[Criterion]:
    """Feasibility never switches off as the delay grows."""
    violations = 0
    planner = OptimalPlanner(options=SolverOptions(epsilon=opts.epsilon))
    for i in range(n):
        cfg, devices = generate_scenario(ScenarioSpec(K=2 + i % 4, seed=opts.seed, trial=i))
        t_min, t_max = init_bounds(cfg, devices)
        grid = np.linspace(0.5 * t_min, 1.5 * t_max, n_grid)
        profile = planner.feasibility_profile(cfg, devices, grid)
        violations += int(np.sum(profile[:-1] & ~profile[1:]))
    return [_le("monotonicity", "ordering_violations", violations, 0)]


def suite_toy_optimality(opts: AcceptanceOptions, n: int = 10) -> list[Criterion]:
    """Exhaustive search agrees with brute force over the numerical oracle.

    The bisection ends on a feasible delay ``T`` with an infeasible one above
    ``T (1 - epsilon)``, so brute force must accept ``T`` and reject
    ``T (1 - epsilon)``.
    """
    start = time.perf_counter()
    oracle_opts = OracleOptions(n_starts=2, seed=opts.seed)
    accepted = rejected = 0
    value_gap = 0.0
    for i in range(n):
        catalog = SystemConfig().cr_catalog[: 2 + i % 2]
        cfg, devices = generate_scenario(
            ScenarioSpec(
                K=1 + i % 3,
                seed=opts.seed,
                trial=i,
                system={"cr_catalog": list(catalog)},
            )
        )
        report = OptimalPlanner(options=SolverOptions(epsilon=opts.epsilon)).plan(cfg, devices)
        T = report.system_delay
        _, best = brute_force_p3(cfg, devices, T, oracle_opts)
        accepted += int(best <= 1 + 1e-6)
        value_gap = max(value_gap, abs(best - report.allocation.sum_tau))
        _, below = brute_force_p3(cfg, devices, T * (1 - opts.epsilon), oracle_opts)
        rejected += int(below > 1)
    return [
        _le("toy-optimality", "brute_force_rejects_optimum", n - accepted, 0),
        _le("toy-optimality", "brute_force_accepts_below", n - rejected, 0),
        _le("toy-optimality", "sum_tau_gap", value_gap, 1e-5),
        _runtime("toy-optimality", start, 120.0),
    ]


def suite_heuristic(opts: AcceptanceOptions, n: int = 20) -> list[Criterion]:
    """The heuristic stays close to the optimum."""
    solver = SolverOptions(epsilon=opts.epsilon)
    opt, heu = [], []
    for i in range(n):
        cfg, devices = generate_scenario(ScenarioSpec(K=2 + i % 4, seed=opts.seed, trial=i))
        opt.append(OptimalPlanner(options=solver).plan(cfg, devices).system_delay)
        heu.append(HeuristicPlanner(options=solver).plan(cfg, devices).system_delay)
    opt_arr, heu_arr = np.array(opt), np.array(heu)
    return [
        _le("heuristic", "mean_gap", heu_arr.mean() / opt_arr.mean() - 1, 0.05),
        _le("heuristic", "opt_above_heu", int(np.sum(opt_arr > heu_arr * (1 + 1e-9))), 0),
    ]


def suite_trends(opts: AcceptanceOptions) -> list[Criterion]:
    """Ordering of the mean curves of the three sweeps."""
    with tempfile.TemporaryDirectory() as tmp:
        job = FigureJob(
            trials=opts.trials,
            strategies=["OPT"],
            seed=opts.seed,
            epsilon=opts.epsilon,
            out_dir=opts.out_dir or tmp,
            n_jobs=opts.n_jobs,
            plot=False,
        )
        fig3 = run_fig3(FigureJob(**{**asdict(job), "figure": "fig3", "sweep": [2, 3, 4, 5, 6]}))
        fig4 = run_fig4(job)
        fig5 = run_fig5(job)
    out = []
    for name, result in (("fig3", fig3), ("fig4", fig4), ("fig5", fig5)):
        for check, ok in result.checks.items():
            out.append(Criterion("trends", f"{name}_{check}", float(not ok), 0.0, ok))
    return out


def suite_convexity(opts: AcceptanceOptions, n: int = 10, n_points: int = 100) -> list[Criterion]:
    """Finite difference minors of the latency constraint."""
    worst, skipped, passed = math.inf, 0, True
    oracle_opts = OracleOptions(n_probes=n_points, seed=opts.seed)
    for i in range(n):
        cfg, devices, crs, T = _random_instance(i, opts, max_k=1)
        dev, o = devices[0], crs[0]
        d = model.device_threshold(cfg, dev, o)
        constraint = LatencyConstraint(
            a=model.local_latency(cfg, dev),
            b=model.transmit_load(cfg, dev, o, 0.0),
            c=dev.image_count * cfg.decode_cycles,
            T=T,
        )
        rng = np.random.default_rng((opts.seed, 9, i))
        samples = sample_interior(constraint, d, cfg.edge_cpu, oracle_opts.n_probes, rng)
        verdict = check_constraint_convexity(samples, constraint, oracle_opts)
        worst = min(worst, verdict.min_minor)
        skipped += verdict.n_skipped
        passed = passed and verdict.passed
    return [
        Criterion("convexity", "min_normalized_minor", worst, -1e-8, passed),
        Criterion("convexity", "skipped_samples", float(skipped), math.nan, True),
    ]


def suite_monte_carlo(opts: AcceptanceOptions) -> list[Criterion]:
    """Simulated channel against the closed-form model."""
    start = time.perf_counter()
    sim = channel.SimOptions(num_slots=opts.num_slots, seed=opts.seed, n_jobs=opts.n_jobs)
    cfg, devices = generate_scenario(ScenarioSpec(K=3, seed=opts.seed))
    dev = devices[0]

    stats = channel.simulate_device(cfg, dev, cfg.max_cr, math.log(2), 1.0, sim)
    ratio_z = abs(stats.empirical_active_ratio - 0.5) / stats.se_active_ratio
    g = model.device_threshold(cfg, dev, cfg.max_cr)
    stats = channel.simulate_device(cfg, dev, cfg.max_cr, g, 1.0, sim)
    target = dev.tx_power / cfg.num_subcarriers
    power_z = abs(stats.empirical_mean_tx_power - target) / stats.se_mean_tx_power

    report = OptimalPlanner(options=SolverOptions(epsilon=opts.epsilon)).plan(cfg, devices)
    checks = channel.validate_allocation(cfg, devices, report.allocation, sim)
    worst_rel = max(c.rel_error for c in checks)
    return [
        _le("monte-carlo", "active_ratio_z", ratio_z, 3.0),
        _le("monte-carlo", "mean_tx_power_z", power_z, 3.0),
        _le("monte-carlo", "tx_delay_rel_error", worst_rel, channel.DELAY_RTOL),
        Criterion(
            "monte-carlo",
            "devices_failing",
            float(sum(not c.passed for c in checks)),
            0.0,
            all(c.passed for c in checks),
        ),
        _runtime("monte-carlo", start, 120.0),
    ]


def _param_error(fit: LogisticParams, truth: LogisticParams) -> float:
    """Largest relative parameter error; c2 relative to max(|c2|, 1)."""
    return max(
        abs(fit.a1 - truth.a1) / truth.a1,
        abs(fit.a2 - truth.a2) / truth.a2,
        abs(fit.c1 - truth.c1) / truth.c1,
        abs(fit.c2 - truth.c2) / max(abs(truth.c2), 1.0),
    )


def random_logistic(rng: np.random.Generator) -> LogisticParams:
    """Logistic curve centered inside the default SNR grid."""
    c1 = rng.uniform(0.15, 0.5)
    return LogisticParams(
        a1=rng.uniform(0.2, 0.5),
        a2=rng.uniform(0.85, 0.99),
        c1=c1,
        c2=-c1 * rng.uniform(-2.0, 10.0),
    )


def suite_fit(
    opts: AcceptanceOptions, n: int = 20, noise: float = 0.002, repeats: int = 200
) -> list[Criterion]:
    """Recovery of synthetic logistic parameters.

    Noiseless fits use one pass over the SNR grid. The noisy experiment is
    enlarged: its samples repeat the grid ``repeats`` times. Errors on ``c2``
    are relative to ``max(|c2|, 1)``.
    """
    rng = np.random.default_rng((opts.seed, 11))
    snr = np.arange(-10.0, 20.5, 1.0)
    exact = noisy = 0.0
    for _ in range(n):
        truth = random_logistic(rng)
        exact = max(exact, _param_error(fit_logistic(logistic_samples(truth, snr)), truth))
        samples = logistic_samples(truth, np.tile(snr, repeats))
        samples[:, 1] += rng.normal(0.0, noise, len(samples))
        noisy = max(noisy, _param_error(fit_logistic(samples), truth))
    return [
        _le("fit", "noiseless_rel_error", exact, 1e-6),
        _le("fit", "noisy_rel_error", noisy, 0.01),
    ]


def suite_determinism(opts: AcceptanceOptions) -> list[Criterion]:
    """Seeded sweeps give byte identical outputs."""
    job = dict(
        figure="fig3",
        sweep=[2, 3, 4],
        trials=3,
        strategies=["OPT", "HEU", "EQU"],
        seed=opts.seed,
        epsilon=opts.epsilon,
    )
    with tempfile.TemporaryDirectory() as tmp:
        outputs = []
        for run, n_jobs in (("a", 1), ("b", 1), ("c", 2)):
            result = run_fig3(FigureJob(**job, out_dir=str(Path(tmp) / run), n_jobs=n_jobs))
            outputs.append((result.csv_path.read_bytes(), result.svg_path.read_bytes()))
    return [
        Criterion("determinism", "csv_identical", 0.0, 0.0, outputs[0][0] == outputs[1][0]),
        Criterion("determinism", "svg_identical", 0.0, 0.0, outputs[0][1] == outputs[1][1]),
        Criterion(
            "determinism", "csv_identical_parallel", 0.0, 0.0, outputs[0][0] == outputs[2][0]
        ),
    ]


SUITES: dict[str, Callable[[AcceptanceOptions], list[Criterion]]] = {
    "e1": suite_e1,
    "inverse": suite_inverse,
    "kkt": suite_kkt,
    "tightness": suite_tightness,
    "monotonicity": suite_monotonicity,
    "toy-optimality": suite_toy_optimality,
    "heuristic": suite_heuristic,
    "trends": suite_trends,
    "convexity": suite_convexity,
    "monte-carlo": suite_monte_carlo,
    "fit": suite_fit,
    "determinism": suite_determinism,
}


def run_acceptance(suite: str = "all", opts: AcceptanceOptions | None = None) -> AcceptanceReport:
    """Run one acceptance suite, or all of them.

    An exception inside a suite is reported as a failed criterion.
    """
    opts = opts or AcceptanceOptions()
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"Unknown suite {suite}, available are {['all', *SUITES]}")
    names = list(SUITES) if suite == "all" else [suite]
    report = AcceptanceReport(suite=suite)
    for name in names:
        log.info("Running acceptance suite %s", name)
        try:
            criteria = SUITES[name](opts)
        except Exception as e:  # noqa: BLE001
            log.exception("Suite %s raised", name)
            criteria = [Criterion(name, "exception", math.nan, math.nan, False, repr(e))]
        for c in criteria:
            (log.info if c.passed else log.error)(
                "[%s] %s = %.6g (bound %.6g): %s",
                c.suite,
                c.name,
                c.value,
                c.bound,
                "pass" if c.passed else "FAIL",
            )
        report.criteria.extend(criteria)
    return report
