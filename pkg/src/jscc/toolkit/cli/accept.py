"""Run the acceptance suites."""

import logging
import sys
from pathlib import Path

from omegaconf import DictConfig

from jscc.toolkit.cli.config import conf_validator, make_hydra_cli
from jscc.toolkit.experiments.acceptance import (
    AcceptanceOptions,
    AcceptanceReport,
    run_acceptance,
)

log = logging.getLogger(__name__)


def accept(cfg: DictConfig) -> AcceptanceReport:
    """Run ``accept.suite`` and write its JSON report.

    Exits with status 1 if a criterion fails.
    """
    cfg = conf_validator(cfg)
    opts = AcceptanceOptions(
        seed=cfg.seed,
        epsilon=cfg.solver.epsilon,
        trials=cfg.accept.trials,
        num_slots=cfg.accept.num_slots,
        n_jobs=cfg.n_jobs,
    )
    report = run_acceptance(cfg.accept.suite, opts)
    Path(cfg.accept.report_file).write_text(report.to_json())
    log.info("Report written to %s", Path(cfg.accept.report_file).resolve())
    if not report.passed:
        log.error("%d criteria failed", len(report.failures))
        sys.exit(1)
    log.info("All %d criteria passed", len(report.criteria))
    return report


accept_cli = make_hydra_cli(accept)

if __name__ == "__main__":
    accept_cli()
