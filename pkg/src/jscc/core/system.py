"""System and device description objects."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .exceptions import DomainError, UnsatisfiableError

log = logging.getLogger(__name__)

#: Clock of one edge server core, in cycles per second.
CORE_FREQUENCY_HZ = 4.9e9

#: Compression ratios offered by the encoders, in decreasing order.
DEFAULT_CR_CATALOG: tuple[float, ...] = (1 / 6, 1 / 8, 1 / 12, 1 / 24)


def dbm_to_watt(value_dbm: float) -> float:
    """Convert a power in dBm to watts."""
    return 10 ** ((value_dbm - 30) / 10)


def watt_to_dbm(value_w: float) -> float:
    """Convert a power in watts to dBm."""
    return 10 * math.log10(value_w) + 30


def db_to_linear(value_db: float) -> float:
    """Convert a ratio in dB to linear scale."""
    return 10 ** (value_db / 10)


def linear_to_db(value: float) -> float:
    """Convert a linear ratio to dB."""
    return 10 * math.log10(value)


def parse_ratio(value: float | str) -> float:
    """Parse a compression ratio given as a number or a fraction string ("1/6")."""
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def parse_edge_cpu(value: float | str) -> float:
    """Normalize an edge CPU budget to cycles per second.

    Percent strings are relative to one server core, so "200%" is two cores.
    """
    if isinstance(value, str):
        value = value.strip()
        if value.endswith("%"):
            return float(value[:-1]) / 100 * CORE_FREQUENCY_HZ
        return float(value)
    return float(value)


@dataclass(frozen=True)
class LogisticParams:
    """Constants of the logistic SSIM model for one compression ratio.

    SSIM(snr_db) = a1 + (a2 - a1) / (1 + exp(-(c1 * snr_db + c2)))
    """

    a1: float
    """Lower asymptote."""
    a2: float
    """Upper asymptote."""
    c1: float
    """Slope, per dB."""
    c2: float
    """Offset."""

    def __post_init__(self) -> None:
        """Validate the parameters."""
        if not 0 <= self.a1 < self.a2 <= 1:
            raise ValueError(
                f"Asymptotes must satisfy 0 <= a1 < a2 <= 1, got {self.a1}, {self.a2}"
            )
        if self.c1 <= 0:
            raise ValueError(f"Slope c1 must be positive, got {self.c1}")

    def covers(self, eta: float) -> bool:
        """Return True if ``eta`` is reachable with a finite SNR."""
        return self.a1 < eta < self.a2


@dataclass(frozen=True)
class DeviceProfile:
    """Parameters of one uplink device."""

    image_count: int
    """L: number of images to encode and send."""
    local_cpu: float
    """f_l: local CPU frequency in cycles/second."""
    tx_power: float = 0.1
    """P: maximum transmit power in watts."""
    distance: float = 50.0
    """r: distance to the base station in meters."""
    ssim_req: float = 0.85
    """eta: SSIM requirement."""

    def __post_init__(self) -> None:
        """Validate the parameters."""
        if self.image_count < 1:
            raise ValueError("image_count must be at least 1.")
        if self.local_cpu <= 0 or self.tx_power <= 0 or self.distance <= 0:
            raise ValueError("local_cpu, tx_power and distance must be positive.")
        if not 0 < self.ssim_req < 1:
            raise ValueError("ssim_req must lie in (0, 1).")


@dataclass(frozen=True)
class SystemConfig:
    """Global constants of the uplink system.

    All powers are stored in watts and all frequencies in cycles per second.
    """

    num_subcarriers: int = 256
    """M: number of orthogonal sub-channels."""
    symbol_duration: float = 1 / 15000
    """T_s: duration of one OFDM symbol, in seconds."""
    noise_power: float = 1e-11
    """sigma2: noise power, in watts (-80 dBm)."""
    path_loss_exp: float = 3.0
    """alpha: path loss exponent."""
    edge_cpu: float = 2 * CORE_FREQUENCY_HZ
    """F_c: edge server budget, in cycles/second."""
    image_height: int = 128
    image_width: int = 128
    encode_cost_per_pixel: float = 2170
    """C_s: encoder cycles per pixel."""
    decode_cost_per_pixel: float = 2510
    """C_s': decoder cycles per pixel."""
    cr_catalog: tuple[float, ...] = DEFAULT_CR_CATALOG
    """Available compression ratios, strictly decreasing."""
    logistic_table: tuple[LogisticParams, ...] = field(default=())
    """SSIM model of each compression ratio, aligned with ``cr_catalog``.

    Left empty, it is filled with the default placeholder table.
    """

    def __post_init__(self) -> None:
        """Validate the parameters."""
        if self.num_subcarriers < 1:
            raise ValueError("num_subcarriers must be at least 1.")
        if min(self.symbol_duration, self.noise_power, self.path_loss_exp) <= 0:
            raise ValueError(
                "symbol_duration, noise_power and path_loss_exp must be positive."
            )
        if self.edge_cpu <= 0:
            raise ValueError("edge_cpu must be positive.")
        if self.image_height < 1 or self.image_width < 1:
            raise ValueError("Image dimensions must be at least 1 pixel.")
        if self.encode_cost_per_pixel <= 0 or self.decode_cost_per_pixel <= 0:
            raise ValueError("Cycle costs per pixel must be positive.")
        catalog = tuple(float(o) for o in self.cr_catalog)
        if not catalog:
            raise ValueError("cr_catalog must not be empty.")
        if any(not 0 < o <= 1 for o in catalog):
            raise ValueError("Compression ratios must lie in (0, 1].")
        if any(a <= b for a, b in zip(catalog[:-1], catalog[1:], strict=True)):
            raise ValueError("cr_catalog must be strictly decreasing.")
        object.__setattr__(self, "cr_catalog", catalog)

        if not self.logistic_table:
            from .fitting import default_logistic_table

            table = default_logistic_table(catalog)
        else:
            table = tuple(self.logistic_table)
        if len(table) != len(catalog):
            raise ValueError("logistic_table needs one entry per compression ratio.")
        object.__setattr__(self, "logistic_table", table)

    @property
    def source_size(self) -> int:
        """D_0: number of source symbols of one image."""
        return 3 * self.image_height * self.image_width

    @property
    def encode_cycles(self) -> float:
        """C^l: encoder cycles per image."""
        return self.encode_cost_per_pixel * self.image_height * self.image_width

    @property
    def decode_cycles(self) -> float:
        """C^d: decoder cycles per image."""
        return self.decode_cost_per_pixel * self.image_height * self.image_width

    @property
    def logistic_map(self) -> Mapping[float, LogisticParams]:
        """Logistic parameters keyed by compression ratio."""
        return dict(zip(self.cr_catalog, self.logistic_table, strict=True))

    @property
    def max_cr(self) -> float:
        """Largest compression ratio of the catalog."""
        return self.cr_catalog[0]

    def cr_index(self, o: float) -> int:
        """Position of ``o`` in the catalog."""
        for i, c in enumerate(self.cr_catalog):
            if math.isclose(c, o, rel_tol=1e-12):
                return i
        raise DomainError(f"Compression ratio {o} is not in the catalog.")

    def logistic_for(self, o: float) -> LogisticParams:
        """Logistic parameters of compression ratio ``o``."""
        return self.logistic_table[self.cr_index(o)]


def satisfiable_crs(cfg: SystemConfig, dev: DeviceProfile) -> list[float]:
    """Compression ratios under which the device SSIM target is reachable."""
    return [
        o
        for o, p in zip(cfg.cr_catalog, cfg.logistic_table, strict=True)
        if p.covers(dev.ssim_req)
    ]


def check_satisfiable(cfg: SystemConfig, devices: Sequence[DeviceProfile]) -> None:
    """Raise if some device cannot meet its SSIM target with any catalog CR."""
    for k, dev in enumerate(devices):
        if not satisfiable_crs(cfg, dev):
            raise UnsatisfiableError(
                f"Device {k} requires SSIM {dev.ssim_req}, outside the range of"
                " every compression ratio of the catalog.",
                device=k,
            )
