"""Validate an allocation with the Monte Carlo channel simulator."""

import json
import logging
from pathlib import Path

import pandas as pd
from omegaconf import DictConfig

from jscc.core.channel import DeviceValidation, validate_allocation
from jscc.core.planners import PlanReport, get_planner
from jscc.toolkit.cli.config import (
    conf_validator,
    input_path,
    make_hydra_cli,
    scenario_spec,
    sim_options,
    solver_options,
)
from jscc.toolkit.experiments.scenario import generate_scenario

log = logging.getLogger(__name__)


def simulate(cfg: DictConfig, report: PlanReport | None = None) -> list[DeviceValidation]:
    """Simulate the uplink of every device of a plan.

    The plan is, in order of preference, ``report``, the JSON file
    ``sim.allocation_file`` or a fresh plan of the scenario.
    """
    cfg = conf_validator(cfg)
    system, devices = generate_scenario(scenario_spec(cfg))
    if report is None and cfg.sim.allocation_file:
        path = input_path(cfg.sim.allocation_file)
        report = PlanReport.from_dict(json.loads(Path(path).read_text()))
        log.info("Loaded plan from %s", path)
    if report is None:
        planner = get_planner(cfg.solver.strategy)(options=solver_options(cfg))
        report = planner.plan(system, devices)
    if not report.ok or report.allocation is None:
        log.error("Nothing to simulate, plan status is %s", report.status.value)
        return []

    results = validate_allocation(system, devices, report.allocation, sim_options(cfg))
    table = pd.DataFrame(
        {
            "device": range(1, len(results) + 1),
            "analytic_tx_delay_s": [r.analytic_tx_delay for r in results],
            "empirical_tx_delay_s": [r.stats.empirical_tx_delay for r in results],
            "stderr_s": [r.stats.se_tx_delay for r in results],
            "active_ratio": [r.stats.empirical_active_ratio for r in results],
            "rel_error": [r.rel_error for r in results],
            "passed": [r.passed for r in results],
        }
    )
    table.to_csv("simulation.csv", index=False, float_format="%.12g")
    log.info("Simulation results:\n%s", table.to_string(index=False))
    if all(r.passed for r in results):
        log.info("Simulated delays agree with the model")
    else:
        log.warning("Simulated delays disagree with the model")
    return results


simulate_cli = make_hydra_cli(simulate)

if __name__ == "__main__":
    simulate_cli()
