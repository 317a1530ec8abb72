"""Tests of the scenario generator and of the figure sweeps."""

import json

import numpy.testing as npt
import pandas as pd
import pytest
from pytest_cases import parametrize

from jscc.core.exceptions import SchemaError
from jscc.core.system import CORE_FREQUENCY_HZ
from jscc.toolkit.experiments import (
    FIGURE_RUNNERS,
    FigureJob,
    ScenarioSpec,
    generate_scenario,
    load_config_file,
    scenario_from_config,
)
from jscc.toolkit.experiments.figures import run_fig3, run_fig4, run_fig5
from jscc.toolkit.experiments.scenario import build_device, build_system_config


def test_scenarios_extend_each_other():
    _, small = generate_scenario(ScenarioSpec(K=3, seed=4, trial=2))
    _, large = generate_scenario(ScenarioSpec(K=6, seed=4, trial=2))
    assert large[:3] == small
    _, other = generate_scenario(ScenarioSpec(K=3, seed=4, trial=3))
    assert other != small


def test_scenario_ranges():
    _, devices = generate_scenario(ScenarioSpec(K=50, seed=1))
    for dev in devices:
        assert 1 <= dev.image_count <= 10
        assert 0.8 <= dev.ssim_req <= 0.93
        assert 1e9 <= dev.local_cpu <= 2e9
        assert 10 <= dev.distance <= 100
        assert dev.tx_power == 0.1


def test_device_overrides():
    spec = ScenarioSpec(
        K=3,
        device_defaults={"ssim_req": 0.9},
        devices=[{"local_cpu_hz": 3e9}, {"image_count": 2}],
    )
    _, devices = generate_scenario(spec)
    assert all(dev.ssim_req == 0.9 for dev in devices)
    assert devices[0].local_cpu == 3e9
    assert devices[1].image_count == 2


def test_system_schema():
    cfg = build_system_config(
        {"noise_power_dbm": -90, "edge_cpu": "300%", "cr_catalog": ["1/6", "1/12"]}
    )
    npt.assert_allclose(cfg.noise_power, 1e-12)
    npt.assert_allclose(cfg.edge_cpu, 3 * CORE_FREQUENCY_HZ)
    npt.assert_allclose(cfg.cr_catalog, (1 / 6, 1 / 12))
    assert len(cfg.logistic_table) == 2


def test_keyed_logistic_table():
    entry = {"a1": 0.55, "a2": 0.93, "c1": 0.25, "c2": -0.5}
    keyed = {"1/12": dict(entry, a2=0.9), "1/6": entry}
    cfg = build_system_config({"cr_catalog": ["1/6", "1/12"], "logistic_table": keyed})
    assert cfg.logistic_for(1 / 12).a2 == 0.9
    assert cfg.logistic_for(1 / 6).a2 == 0.93


@parametrize(
    "table,message",
    [
        ([{"compression_ratio": "1/6", "a1": 0.5, "a2": 0.9, "c1": 0.3, "c2": 0}], "no entry"),
        (
            [
                {"compression_ratio": r, "a1": 0.5, "a2": 0.9, "c1": 0.3, "c2": 0}
                for r in ("1/6", "1/12", "1/24")
            ],
            "not in cr_catalog",
        ),
        (
            [
                {"compression_ratio": "1/6", "a1": 0.5, "a2": 0.9, "c1": 0.3, "c2": 0},
                {"a1": 0.5, "a2": 0.9, "c1": 0.3, "c2": 0},
            ],
            "every entry or none",
        ),
        ([{"compression_ratio": "1/6", "a1": 0.5, "a2": 0.9, "c1": 0.3}], "missing field"),
    ],
)
def test_keyed_logistic_table_errors(table: list, message: str):
    with pytest.raises(SchemaError, match=message) as info:
        build_system_config({"cr_catalog": ["1/6", "1/12"], "logistic_table": table})
    assert info.value.path.startswith("system.logistic_table")


@parametrize(
    "data,path",
    [
        ({"num_subcarier": 64}, "system.num_subcarier"),
        ({"noise_power_w": 1e-11, "noise_power_dbm": -80}, "system.noise_power_dbm"),
        ({"num_subcarriers": 2.5}, "system.num_subcarriers"),
        ({"cr_catalog": "1/6"}, "system.cr_catalog"),
        ({"cr_catalog": ["1/12", "1/6"]}, "system"),
    ],
)
def test_system_schema_errors(data: dict, path: str):
    with pytest.raises(SchemaError) as info:
        build_system_config(data)
    assert info.value.path == path


def test_device_schema_errors():
    with pytest.raises(SchemaError) as info:
        build_device({"image_count": 2, "local_cpu_hz": 1e9, "ssim": 0.9}, "devices[1]")
    assert info.value.path == "devices[1].ssim"
    with pytest.raises(SchemaError):
        build_device({"image_count": 0, "local_cpu_hz": 1e9})


def test_spec_validation():
    with pytest.raises(SchemaError):
        ScenarioSpec(K=0)
    with pytest.raises(SchemaError):
        ScenarioSpec(ssim_req=(0.9, 0.8))
    with pytest.raises(SchemaError):
        ScenarioSpec(K=1, devices=[{}, {}])


@parametrize(suffix=[".json", ".yaml"])
def test_config_files(tmp_path, suffix: str):
    data = {"system": {"edge_cpu": "100%"}, "scenario": {"K": 2, "seed": 3}}
    path = tmp_path / f"scenario{suffix}"
    if suffix == ".json":
        path.write_text(json.dumps(data))
    else:
        path.write_text("system:\n  edge_cpu: 100%\nscenario:\n  K: 2\n  seed: 3\n")
    loaded = load_config_file(path)
    assert loaded == data
    spec = scenario_from_config(loaded)
    cfg, devices = generate_scenario(spec)
    assert len(devices) == 2
    npt.assert_allclose(cfg.edge_cpu, CORE_FREQUENCY_HZ)


def test_figure_job_validation():
    with pytest.raises(ValueError):
        FigureJob(figure="fig9")
    with pytest.raises(ValueError):
        FigureJob(trials=0)
    job = FigureJob(figure="fig5", K=2)
    assert job.K == 5
    assert job.sweep == sorted(job.sweep) and job.sweep
    assert FigureJob(strategies=["opt", "heu"]).strategies == ["OPT", "HEU"]
    assert set(FIGURE_RUNNERS) == {"fig3", "fig4", "fig5"}


def test_fig3(tmp_path):
    job = FigureJob(
        figure="fig3",
        sweep=[2, 3],
        trials=2,
        strategies=["OPT", "HEU", "EQU", "FIX_O"],
        out_dir=str(tmp_path),
    )
    result = run_fig3(job)
    table = pd.read_csv(result.csv_path)
    assert list(table.columns) == ["K", "strategy", "mean_delay_s", "stderr", "status"]
    assert len(table) == 2 * 4
    assert (table["status"] == "success").all()
    assert result.checks["opt_le_heu"] and result.checks["opt_le_equ"]
    assert result.checks["opt_le_fix_o"]
    assert result.svg_path.read_text().lstrip().startswith("<?xml")
    assert len(result.trials) == 2 * 2 * 4


def test_fig4_without_plot(tmp_path):
    job = FigureJob(
        figure="fig4",
        sweep=[100, 300],
        trials=2,
        K=3,
        strategies=["OPT", "EQU"],
        out_dir=str(tmp_path),
        plot=False,
    )
    result = run_fig4(job)
    assert result.svg_path is None
    assert result.table["edge_cpu_percent"].tolist() == [100, 100, 300, 300]
    opt = result.table[result.table["strategy"] == "OPT"]["mean_delay_s"].to_numpy()
    # more edge CPU never hurts
    assert opt[1] <= opt[0] * (1 + 1e-3)


def test_fig5(tmp_path):
    job = FigureJob(
        figure="fig5", sweep=[1.0, 3.0], strategies=["OPT"], out_dir=str(tmp_path), plot=False
    )
    result = run_fig5(job)
    table = pd.read_csv(result.csv_path)
    assert list(table.columns) == ["f1_local_ghz", "strategy", "device", "edge_share", "status"]
    assert len(table) == 2 * 5
    assert result.checks["shares_sum_to_one"]
    shares = result.table.pivot(index="f1_local_ghz", columns="device", values="edge_share")
    # a faster first device leaves it more time to decode
    assert shares.loc[3.0, 1] < shares.loc[1.0, 1]


def test_runner_ignores_foreign_sweep(tmp_path):
    job = FigureJob(figure="fig3", sweep=[2], trials=1, strategies=["OPT"], out_dir=str(tmp_path), plot=False)
    result = run_fig4(job)
    assert result.table["edge_cpu_percent"].tolist() == [100, 200, 300, 400, 500]
