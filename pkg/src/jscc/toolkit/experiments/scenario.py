"""Random scenarios and ingestion of system descriptions.

Configuration documents use unit suffixed keys. A system section looks like::

    system:
      num_subcarriers: 256
      noise_power_dbm: -80        # or noise_power_w, not both
      edge_cpu: "200%"            # or cycles per second
      cr_catalog: ["1/6", "1/8", "1/12", "1/24"]
      logistic_table:             # jscc-fit outputs, matched by ratio
        - {compression_ratio: "1/6", a1: 0.5, a2: 0.95, c1: 0.3, c2: 0.0}
        - ...

and devices use ``image_count``, ``local_cpu_hz``, ``tx_power_w``,
``distance_m`` and ``ssim_req``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from omegaconf import OmegaConf

from jscc.core.exceptions import SchemaError
from jscc.core.system import (
    DEFAULT_CR_CATALOG,
    DeviceProfile,
    LogisticParams,
    SystemConfig,
    dbm_to_watt,
    parse_edge_cpu,
    parse_ratio,
)

log = logging.getLogger(__name__)


def _integer(value: Any) -> int:
    if isinstance(value, bool) or int(value) != float(value):
        raise ValueError(f"expected an integer, got {value!r}")
    return int(value)


def _number(value: Any) -> float:
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    return float(value)


def _catalog(value: Any) -> tuple[float, ...]:
    if isinstance(value, str | bytes) or not hasattr(value, "__iter__"):
        raise ValueError("expected a list of compression ratios")
    return tuple(parse_ratio(v) for v in value)


def _logistic_entry(row: Any) -> LogisticParams:
    return LogisticParams(**{k: _number(row[k]) for k in ("a1", "a2", "c1", "c2")})


def _logistic_table(value: Any) -> tuple[LogisticParams, ...] | dict[float, LogisticParams]:
    """Parse a positional table or entries keyed by ``compression_ratio``.

    Keyed entries are what ``jscc-fit`` writes. They may also be given as a
    mapping from ratio to parameters. Keyed tables are aligned with the
    catalog in :func:`build_system_config`.
    """
    if isinstance(value, Mapping):
        return {parse_ratio(o): _logistic_entry(row) for o, row in value.items()}
    if isinstance(value, str | bytes) or not hasattr(value, "__iter__"):
        raise ValueError("expected a list of logistic parameters")
    rows = [dict(row) for row in value]
    keyed = ["compression_ratio" in row for row in rows]
    if not any(keyed):
        return tuple(_logistic_entry(row) for row in rows)
    if not all(keyed):
        raise ValueError("either every entry or none has a compression_ratio")
    table: dict[float, LogisticParams] = {}
    for row in rows:
        o = parse_ratio(row["compression_ratio"])
        if o in table:
            raise ValueError(f"compression ratio {o} is given twice")
        table[o] = _logistic_entry(row)
    return table


def _align_table(
    table: Mapping[float, LogisticParams], catalog: Sequence[float], path: str
) -> tuple[LogisticParams, ...]:
    aligned = []
    unused = dict(table)
    for o in catalog:
        match = next((k for k in unused if math.isclose(k, o, rel_tol=1e-12)), None)
        if match is None:
            raise SchemaError(path, f"no entry for compression ratio {o:.6g}")
        aligned.append(unused.pop(match))
    if unused:
        raise SchemaError(path, f"ratios {sorted(unused, reverse=True)} are not in cr_catalog")
    return tuple(aligned)


# schema key -> (SystemConfig field, converter)
SYSTEM_KEYS: dict[str, tuple[str, Callable[[Any], Any]]] = {
    "num_subcarriers": ("num_subcarriers", _integer),
    "symbol_duration_s": ("symbol_duration", _number),
    "noise_power_w": ("noise_power", _number),
    "noise_power_dbm": ("noise_power", lambda v: dbm_to_watt(_number(v))),
    "path_loss_exp": ("path_loss_exp", _number),
    "edge_cpu": ("edge_cpu", parse_edge_cpu),
    "image_height": ("image_height", _integer),
    "image_width": ("image_width", _integer),
    "encode_cycles_per_pixel": ("encode_cost_per_pixel", _number),
    "decode_cycles_per_pixel": ("decode_cost_per_pixel", _number),
    "cr_catalog": ("cr_catalog", _catalog),
    "logistic_table": ("logistic_table", _logistic_table),
}

DEVICE_KEYS: dict[str, tuple[str, Callable[[Any], Any]]] = {
    "image_count": ("image_count", _integer),
    "local_cpu_hz": ("local_cpu", _number),
    "tx_power_w": ("tx_power", _number),
    "distance_m": ("distance", _number),
    "ssim_req": ("ssim_req", _number),
}


def _convert(
    data: Mapping[str, Any],
    keys: Mapping[str, tuple[str, Callable[[Any], Any]]],
    path: str,
) -> dict[str, Any]:
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key not in keys:
            raise SchemaError(f"{path}.{key}", f"unknown field, expected one of {sorted(keys)}")
        name, convert = keys[key]
        if name in kwargs:
            raise SchemaError(f"{path}.{key}", f"{name} is given twice")
        try:
            kwargs[name] = convert(value)
        except KeyError as e:
            raise SchemaError(f"{path}.{key}", f"missing field {e}") from e
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise SchemaError(f"{path}.{key}", str(e)) from e
    return kwargs


def build_system_config(data: Mapping[str, Any] | None, path: str = "system") -> SystemConfig:
    """Build a :class:`SystemConfig` from a unit suffixed mapping.

    Raises
    ------
    SchemaError
        On unknown keys, both noise keys, invalid values, or a keyed
        logistic table that does not match the catalog.
    """
    kwargs = _convert(data or {}, SYSTEM_KEYS, path)
    table = kwargs.get("logistic_table")
    if isinstance(table, Mapping):
        catalog = kwargs.get("cr_catalog", DEFAULT_CR_CATALOG)
        kwargs["logistic_table"] = _align_table(table, catalog, f"{path}.logistic_table")
    try:
        return SystemConfig(**kwargs)
    except ValueError as e:
        raise SchemaError(path, str(e)) from e


def build_device(data: Mapping[str, Any], path: str = "device") -> DeviceProfile:
    """Build a :class:`DeviceProfile` from a unit suffixed mapping."""
    kwargs = _convert(data, DEVICE_KEYS, path)
    try:
        return DeviceProfile(**kwargs)
    except (TypeError, ValueError) as e:
        raise SchemaError(path, str(e)) from e


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a YAML or JSON configuration document."""
    data = OmegaConf.to_container(OmegaConf.load(path), resolve=True)
    if not isinstance(data, dict):
        raise SchemaError(str(path), "top level must be a mapping")
    return data


@dataclass
class ScenarioSpec:
    """Recipe of a random multi-device scenario.

    Device ``k`` of trial ``t`` is drawn from its own random stream, seeded by
    ``(seed, trial, k)``, so a scenario with more devices extends the one with
    fewer.
    """

    K: int = 5
    seed: int = 0
    trial: int = 0
    image_count: tuple[int, int] = (1, 10)
    """Inclusive bounds of the number of images."""
    ssim_req: tuple[float, float] = (0.8, 0.93)
    local_cpu_ghz: tuple[float, float] = (1.0, 2.0)
    distance_m: tuple[float, float] = (10.0, 100.0)
    tx_power_w: float = 0.1
    system: dict[str, Any] = field(default_factory=dict)
    """Overrides of the system section."""
    device_defaults: dict[str, Any] = field(default_factory=dict)
    """Overrides applied to every device."""
    devices: list[dict[str, Any]] = field(default_factory=list)
    """Per device overrides, by position."""

    def __post_init__(self) -> None:
        """Validate the recipe."""
        if self.K < 1:
            raise SchemaError("scenario.K", "at least one device is needed")
        for name in ("image_count", "ssim_req", "local_cpu_ghz", "distance_m"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise SchemaError(f"scenario.{name}", f"bounds are not ordered: {lo} > {hi}")
            setattr(self, name, (lo, hi))
        if len(self.devices) > self.K:
            raise SchemaError("scenario.devices", f"more overrides than the {self.K} devices")


def generate_scenario(spec: ScenarioSpec) -> tuple[SystemConfig, list[DeviceProfile]]:
    """Draw the devices of a scenario and build its system configuration."""
    cfg = build_system_config(spec.system)
    devices = []
    for k in range(spec.K):
        rng = np.random.default_rng((spec.seed, spec.trial, k))
        drawn = {
            "image_count": int(rng.integers(spec.image_count[0], spec.image_count[1] + 1)),
            "ssim_req": float(rng.uniform(*spec.ssim_req)),
            "local_cpu_hz": float(rng.uniform(*spec.local_cpu_ghz)) * 1e9,
            "distance_m": float(rng.uniform(*spec.distance_m)),
            "tx_power_w": spec.tx_power_w,
        }
        drawn.update(spec.device_defaults)
        if k < len(spec.devices):
            drawn.update(spec.devices[k])
        devices.append(build_device(drawn, path=f"scenario.devices[{k}]"))
    log.debug("Generated %d devices (seed=%d, trial=%d)", spec.K, spec.seed, spec.trial)
    return cfg, devices


def scenario_from_config(data: Mapping[str, Any]) -> ScenarioSpec:
    """Build a scenario recipe from the ``scenario`` and ``system`` sections."""
    section = dict(data.get("scenario") or {})
    section.setdefault("system", dict(data.get("system") or {}))
    try:
        return ScenarioSpec(**section)
    except TypeError as e:
        raise SchemaError("scenario", str(e)) from e
