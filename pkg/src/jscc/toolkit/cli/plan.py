"""Plan the resources of one scenario."""

import json
import logging
from pathlib import Path

from omegaconf import DictConfig

from jscc.core.exceptions import InfeasibleError, UnsatisfiableError
from jscc.core.planners import PlanReport, PlanStatus, Strategy, get_planner, verify_report
from jscc.toolkit.cli.config import (
    conf_validator,
    make_hydra_cli,
    scenario_spec,
    solver_options,
)
from jscc.toolkit.experiments.scenario import generate_scenario

log = logging.getLogger(__name__)


def plan(cfg: DictConfig) -> PlanReport:
    """Plan a scenario and write the report as JSON."""
    cfg = conf_validator(cfg)
    system, devices = generate_scenario(scenario_spec(cfg))
    planner = get_planner(cfg.solver.strategy)(options=solver_options(cfg))
    log.info("Planning %d devices with %s", len(devices), planner.strategy)
    try:
        report = planner.plan(system, devices)
    except (InfeasibleError, UnsatisfiableError) as e:
        log.error("Planning failed: %s", e)
        status = (
            PlanStatus.UNSATISFIABLE
            if isinstance(e, UnsatisfiableError)
            else PlanStatus.INFEASIBLE
        )
        report = PlanReport(
            strategy=Strategy[cfg.solver.strategy], status=status, message=str(e)
        )

    if report.ok:
        verdict = verify_report(system, devices, report)
        if verdict.passed:
            log.info("System delay: %.6g s, all constraints hold", report.system_delay)
        else:
            log.warning("Constraints violated: %s", verdict.failures)
        log.info("Allocation:\n%s", report.allocation.to_frame().to_string())

    text = json.dumps(report.to_dict(), indent=2)
    print(text)
    Path(cfg.plan_file).write_text(text)
    log.info("Report written to %s", Path(cfg.plan_file).resolve())
    return report


plan_cli = make_hydra_cli(plan)

if __name__ == "__main__":
    plan_cli()
