"""Scenarios, figure sweeps and acceptance suites."""

from .acceptance import AcceptanceOptions, AcceptanceReport, run_acceptance
from .figures import FIGURE_RUNNERS, FigureJob, FigureResult, run_figure
from .scenario import ScenarioSpec, generate_scenario, load_config_file, scenario_from_config

__all__ = [
    "FIGURE_RUNNERS",
    "AcceptanceOptions",
    "AcceptanceReport",
    "FigureJob",
    "FigureResult",
    "ScenarioSpec",
    "generate_scenario",
    "load_config_file",
    "run_acceptance",
    "run_figure",
    "scenario_from_config",
]
