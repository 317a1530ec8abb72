"""Tests of the command line configuration and commands."""

import json

import pandas as pd
import pytest
import yaml
from omegaconf import DictConfig, OmegaConf
from pytest_cases import fixture

from jscc.core.exceptions import SchemaError
from jscc.core.fitting import ANCHOR_SNR_DB, anchor_params, logistic_samples
from jscc.core.planners import PlanStatus, Strategy
from jscc.core.system import parse_ratio
from jscc.toolkit.experiments.acceptance import Criterion
from jscc.toolkit.cli.config import (
    ConfigJSCC,
    conf_validator,
    figure_job,
    scenario_spec,
    sim_options,
    solver_options,
)
from jscc.toolkit.cli.accept import accept
from jscc.toolkit.cli.figures import figure
from jscc.toolkit.cli.fit import fit
from jscc.toolkit.cli.plan import plan
from jscc.toolkit.cli.simulate import simulate
from jscc.toolkit.experiments.scenario import build_system_config


@fixture
def cfg(tmp_path, monkeypatch) -> DictConfig:
    monkeypatch.chdir(tmp_path)
    conf = OmegaConf.structured(ConfigJSCC(result_dir=str(tmp_path)))
    conf.scenario.K = 2
    conf.sim.num_slots = 2000
    return conf


def test_defaults(cfg: DictConfig):
    obj = conf_validator(cfg)
    assert obj.solver.strategy == "OPT"
    assert solver_options(obj).epsilon == 1e-3
    spec = scenario_spec(obj)
    assert spec.K == 2 and spec.image_count == (1, 10)
    assert sim_options(obj).num_slots == 2000
    job = figure_job(obj)
    assert job.figure == "fig3" and job.out_dir == "."


def test_unknown_strategy(cfg: DictConfig):
    cfg.solver.strategy = "BEST"
    with pytest.raises(SchemaError) as info:
        conf_validator(cfg)
    assert info.value.path == "solver.strategy"


def test_config_file_merge(cfg: DictConfig, tmp_path):
    path = tmp_path / "system.json"
    path.write_text(
        json.dumps(
            {
                "system": {"edge_cpu": "300%", "cr_catalog": ["1/6", "1/12"]},
                "solver": {"strategy": "heu"},
                "scenario": {"devices": [{"image_count": 3}]},
            }
        )
    )
    cfg.config_file = str(path)
    obj = conf_validator(cfg)
    assert obj.solver.strategy == "heu"
    assert obj.system["edge_cpu"] == "300%"
    assert scenario_spec(obj).devices == [{"image_count": 3}]


def test_config_file_unknown_key(cfg: DictConfig, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("solver:\n  tolerance: 0.1\n")
    cfg.config_file = str(path)
    with pytest.raises(SchemaError):
        conf_validator(cfg)


def test_plan_then_simulate(cfg: DictConfig, tmp_path):
    report = plan(cfg)
    assert report.status is PlanStatus.SUCCESS
    data = json.loads((tmp_path / "plan.json").read_text())
    assert data["strategy"] == "OPT"
    assert data["system_delay_s"] == pytest.approx(report.system_delay)

    cfg.sim.allocation_file = str(tmp_path / "plan.json")
    results = simulate(cfg)
    assert len(results) == 2
    table = pd.read_csv(tmp_path / "simulation.csv")
    assert table["device"].tolist() == [1, 2]
    assert table["rel_error"].max() <= 0.02


def test_plan_unsatisfiable(cfg: DictConfig, tmp_path):
    cfg.scenario.device_defaults = {"ssim_req": 0.995}
    cfg.solver.strategy = Strategy.EQU.name
    report = plan(cfg)
    assert report.status is PlanStatus.UNSATISFIABLE
    cfg.solver.strategy = Strategy.OPT.name
    report = plan(cfg)
    assert report.status is PlanStatus.UNSATISFIABLE
    assert json.loads((tmp_path / "plan.json").read_text())["status"] == "unsatisfiable"


def test_fit_command(cfg: DictConfig, tmp_path):
    truth = anchor_params(1 / 8)
    samples = logistic_samples(truth, ANCHOR_SNR_DB)
    pd.DataFrame(samples, columns=["snr_db", "ssim"]).to_csv(tmp_path / "samples.csv", index=False)
    cfg.fit.samples_file = str(tmp_path / "samples.csv")
    cfg.fit.compression_ratio = "1/8"
    params = fit(cfg)
    assert params.c1 == pytest.approx(truth.c1, rel=1e-5)
    written = yaml.safe_load((tmp_path / "logistic.yaml").read_text())
    assert written["compression_ratio"] == pytest.approx(0.125)
    assert written["a2"] == pytest.approx(truth.a2, rel=1e-5)


def test_fit_output_loads_as_table(cfg: DictConfig, tmp_path):
    catalog = ["1/6", "1/12"]
    entries = []
    for ratio in catalog:
        truth = anchor_params(parse_ratio(ratio))
        samples = logistic_samples(truth, ANCHOR_SNR_DB)
        pd.DataFrame(samples, columns=["snr_db", "ssim"]).to_csv(
            tmp_path / "samples.csv", index=False
        )
        cfg.fit.samples_file = str(tmp_path / "samples.csv")
        cfg.fit.compression_ratio = ratio
        fit(cfg)
        entries.append(yaml.safe_load((tmp_path / "logistic.yaml").read_text()))

    # entries listed out of catalog order on purpose
    system = build_system_config({"cr_catalog": catalog, "logistic_table": entries[::-1]})
    for ratio, params in zip(catalog, system.logistic_table, strict=True):
        truth = anchor_params(parse_ratio(ratio))
        assert params.a1 == pytest.approx(truth.a1, rel=1e-5)
        assert params.c1 == pytest.approx(truth.c1, rel=1e-5)
        assert system.logistic_for(parse_ratio(ratio)) is params


def test_fit_requires_samples(cfg: DictConfig):
    with pytest.raises(SchemaError) as info:
        fit(cfg)
    assert info.value.path == "fit.samples_file"


def test_figure_command(cfg: DictConfig, tmp_path):
    cfg.figure.figure = "fig4"
    cfg.figure.sweep = [200.0, 400.0]
    cfg.figure.trials = 1
    cfg.figure.strategies = ["OPT", "EQU"]
    cfg.figure.plot = False
    result = figure(cfg)
    assert result.csv_path.resolve() == (tmp_path / "fig4.csv").resolve()
    table = pd.read_csv(tmp_path / "fig4.csv")
    assert set(table["strategy"]) == {"OPT", "EQU"}
    assert result.svg_path is None


def test_accept_command(cfg: DictConfig, tmp_path):
    cfg.accept.suite = "tightness"
    report = accept(cfg)
    assert report.passed
    data = json.loads((tmp_path / "acceptance.json").read_text())
    assert data["passed"] is True


def test_accept_command_fails(cfg: DictConfig, tmp_path, monkeypatch):
    monkeypatch.setattr(
        "jscc.toolkit.experiments.acceptance.SUITES",
        {"broken": lambda o: [Criterion("broken", "value", 2.0, 1.0, False)]},
    )
    with pytest.raises(SystemExit) as info:
        accept(cfg)
    assert info.value.code == 1
    assert json.loads((tmp_path / "acceptance.json").read_text())["passed"] is False
