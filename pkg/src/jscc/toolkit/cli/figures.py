"""Run one of the figure sweeps."""

import logging

from omegaconf import DictConfig

from jscc.toolkit.cli.config import conf_validator, figure_job, make_hydra_cli
from jscc.toolkit.experiments.figures import FIGURE_RUNNERS, FigureResult

log = logging.getLogger(__name__)


def figure(cfg: DictConfig) -> FigureResult:
    """Run the sweep selected by ``figure.figure`` in the run directory."""
    cfg = conf_validator(cfg)
    job = figure_job(cfg)
    result = FIGURE_RUNNERS[job.figure](job)
    log.info("Table written to %s", result.csv_path.resolve())
    if result.svg_path is not None:
        log.info("Plot written to %s", result.svg_path.resolve())
    if not result.passed:
        failed = [name for name, ok in result.checks.items() if not ok]
        log.warning("Failed checks: %s", failed)
    return result


figure_cli = make_hydra_cli(figure)

if __name__ == "__main__":
    figure_cli()
