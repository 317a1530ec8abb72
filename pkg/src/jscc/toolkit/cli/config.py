"""Configuration of the command line tools using Hydra."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Optional

import hydra
from hydra.core.config_store import ConfigStore
from hydra.core.hydra_config import HydraConfig
from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from jscc.core.channel import SimOptions
from jscc.core.exceptions import SchemaError
from jscc.core.planners import BasePlanner, SolverOptions, Strategy
from jscc.core.special import DEFAULT_EPSILON2
from jscc.toolkit.experiments.figures import FigureJob
from jscc.toolkit.experiments.scenario import ScenarioSpec, load_config_file

log = logging.getLogger(__name__)

#: Config groups, whose overrides select a node instead of setting a value.
GROUPS = ("planner",)


@dataclass
class SolverConfig:
    """Planner selection and tolerances."""

    strategy: str = "OPT"
    epsilon: float = 1e-3
    epsilon2: float = DEFAULT_EPSILON2
    max_outer_iters: int = 200


@dataclass
class ScenarioConfig:
    """Random scenario recipe, see :class:`ScenarioSpec`."""

    K: int = 5
    trial: int = 0
    image_count: list[int] = field(default_factory=lambda: [1, 10])
    ssim_req: list[float] = field(default_factory=lambda: [0.8, 0.93])
    local_cpu_ghz: list[float] = field(default_factory=lambda: [1.0, 2.0])
    distance_m: list[float] = field(default_factory=lambda: [10.0, 100.0])
    tx_power_w: float = 0.1
    device_defaults: dict[str, Any] = field(default_factory=dict)
    devices: list[Any] = field(default_factory=list)


@dataclass
class FigureConfig:
    """Figure sweep, see :class:`FigureJob`."""

    figure: str = "fig3"
    sweep: list[float] = field(default_factory=list)
    trials: int = 20
    strategies: list[str] = field(default_factory=lambda: [s.name for s in Strategy])
    K: int = 5
    plot: bool = True


@dataclass
class SimConfig:
    """Monte Carlo validation settings."""

    num_slots: int = 100_000
    chunk_slots: int = 1000
    allocation_file: Optional[str] = None
    """Plan JSON to validate; the scenario is planned if None."""
    trace_file: Optional[str] = None


@dataclass
class AcceptConfig:
    """Acceptance suites to run."""

    suite: str = "all"
    trials: int = 20
    num_slots: int = 100_000
    report_file: str = "acceptance.json"


@dataclass
class FitConfig:
    """Logistic fit of measured samples."""

    samples_file: Optional[str] = None
    """CSV with ``snr_db`` and ``ssim`` columns."""
    output_file: str = "logistic.yaml"
    compression_ratio: Optional[str] = None


@dataclass
class ConfigJSCC:
    """Configuration of the command line tools."""

    system: dict[str, Any] = field(default_factory=dict)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    figure: FigureConfig = field(default_factory=FigureConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    accept: AcceptConfig = field(default_factory=AcceptConfig)
    fit: FitConfig = field(default_factory=FitConfig)
    seed: int = 0
    n_jobs: int = 1
    config_file: Optional[str] = None
    """YAML or JSON document merged over the defaults, below the CLI overrides."""
    plan_file: str = "plan.json"
    result_dir: str = "${oc.env:PWD}/results"


def _task_overrides() -> list[str]:
    """Value overrides given on the command line."""
    if not HydraConfig.initialized():
        return []
    out = []
    for o in HydraConfig.get().overrides.task:
        key = o.split("=", 1)[0].lstrip("+")
        if "=" in o and not o.startswith("~") and key not in GROUPS:
            out.append(o.lstrip("+"))
    return out


def conf_validator(cfg: DictConfig) -> ConfigJSCC:
    """Merge the configuration file and validate the configuration."""
    if cfg.get("config_file"):
        data = load_config_file(input_path(cfg.config_file))
        try:
            cfg = OmegaConf.merge(cfg, data, OmegaConf.from_dotlist(_task_overrides()))
        except OmegaConfBaseException as e:
            raise SchemaError(str(getattr(e, "full_key", "") or cfg.config_file), str(e)) from e
        log.info("Merged configuration file %s", cfg.config_file)
    cfg_obj: ConfigJSCC = OmegaConf.to_object(cfg)
    try:
        Strategy[cfg_obj.solver.strategy]
    except KeyError as e:
        raise SchemaError(
            "solver.strategy", f"unknown strategy, expected one of {[s.name for s in Strategy]}"
        ) from e
    return cfg_obj


def solver_options(cfg: ConfigJSCC) -> SolverOptions:
    """Planner options of the configuration."""
    return SolverOptions(
        epsilon=cfg.solver.epsilon,
        epsilon2=cfg.solver.epsilon2,
        max_outer_iters=cfg.solver.max_outer_iters,
        n_jobs=cfg.n_jobs,
    )


def scenario_spec(cfg: ConfigJSCC) -> ScenarioSpec:
    """Scenario recipe of the configuration."""
    sc = cfg.scenario
    return ScenarioSpec(
        K=sc.K,
        seed=cfg.seed,
        trial=sc.trial,
        image_count=tuple(sc.image_count),
        ssim_req=tuple(sc.ssim_req),
        local_cpu_ghz=tuple(sc.local_cpu_ghz),
        distance_m=tuple(sc.distance_m),
        tx_power_w=sc.tx_power_w,
        system=dict(cfg.system),
        device_defaults=dict(sc.device_defaults),
        devices=[dict(d) for d in sc.devices],
    )


def sim_options(cfg: ConfigJSCC) -> SimOptions:
    """Monte Carlo options of the configuration."""
    return SimOptions(
        num_slots=cfg.sim.num_slots,
        seed=cfg.seed,
        chunk_slots=cfg.sim.chunk_slots,
        n_jobs=cfg.n_jobs,
        trace_file=cfg.sim.trace_file,
    )


def figure_job(cfg: ConfigJSCC) -> FigureJob:
    """Figure sweep of the configuration, written in the run directory."""
    fig = cfg.figure
    return FigureJob(
        figure=fig.figure,
        sweep=list(fig.sweep),
        trials=fig.trials,
        strategies=list(fig.strategies),
        seed=cfg.seed,
        K=fig.K,
        epsilon=cfg.solver.epsilon,
        epsilon2=cfg.solver.epsilon2,
        system=dict(cfg.system),
        out_dir=".",
        n_jobs=cfg.n_jobs,
        plot=fig.plot,
    )


cs = ConfigStore.instance()
cs.store(name="base_config", node=ConfigJSCC)

for planner_name in BasePlanner.__registry__:
    cs.store(
        group="planner",
        name=planner_name.lower(),
        node=SolverConfig(strategy=planner_name),
        package="solver",
    )


def make_hydra_cli(fun: Callable) -> Callable:
    """Create a Hydra CLI for the function."""
    return hydra.main(
        version_base=None, config_path="../../../jscc-conf", config_name="config"
    )(fun)


def input_path(path: str) -> str:
    """Resolve a user given path against the launch directory.

    Hydra runs the job in its output directory.
    """
    if HydraConfig.initialized():
        return hydra.utils.to_absolute_path(path)
    return path
