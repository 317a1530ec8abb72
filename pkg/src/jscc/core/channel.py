"""Monte Carlo simulation of the truncated channel inversion uplink.

Every slot draws ``M`` Rayleigh power gains :math:`|h|^2 \\sim Exp(1)`. A
sub-channel is used only if its gain reaches the threshold ``g``; the
transmitter then inverts the channel so that every received symbol has power
:math:`\\rho`.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from .allocation import Allocation
from .exceptions import DomainError
from .model import path_gain, received_power, transmit_latency
from .parallel import run_parallel
from .system import DeviceProfile, SystemConfig

log = logging.getLogger(__name__)

#: Relative delay error accepted once enough slots are simulated.
DELAY_RTOL = 0.02
MIN_SLOTS_FOR_RTOL = 100_000
N_SIGMA = 3.0
#: Relative gap accepted when every slot activates the same sub-channel count.
EXACT_RTOL = 1e-12


@dataclass
class SimOptions:
    """Monte Carlo settings."""

    num_slots: int = 100_000
    seed: int = 0
    chunk_slots: int = 1000
    """Slots per random stream; fixed so results do not depend on ``n_jobs``."""
    n_jobs: int = 1
    trace_file: str | None = None
    """If set, per-slot CSV dump (slot, active_count, tx_power_sum)."""

    def __post_init__(self) -> None:
        """Validate the options."""
        if self.num_slots < 1 or self.chunk_slots < 1:
            raise ValueError("num_slots and chunk_slots must be at least 1.")


@dataclass(frozen=True)
class SimStats:
    """Empirical statistics of one device, with standard errors."""

    empirical_active_ratio: float
    empirical_mean_tx_power: float
    """Mean transmit power per sub-channel and slot, in watts."""
    empirical_rx_power: float
    """Mean received power of the active symbols, in watts."""
    empirical_symbols_per_slot: float
    empirical_tx_delay: float
    se_active_ratio: float
    se_mean_tx_power: float
    se_rx_power: float
    se_symbols_per_slot: float
    se_tx_delay: float
    num_slots: int


@dataclass(frozen=True)
class DeviceValidation:
    """Comparison of the simulated and analytic transmission delay."""

    stats: SimStats
    analytic_tx_delay: float
    rel_error: float
    z_score: float
    passed: bool


def _simulate_chunk(
    chunk: tuple[int, int, int],
    seed: int,
    device_index: int,
    num_subcarriers: int,
    g: float,
    rho: float,
    gain: float,
    keep_trace: bool,
) -> tuple[list[float], NDArray | None]:
    """Simulate slots ``[start, stop)`` with the random stream ``index``."""
    index, start, stop = chunk
    rng = np.random.default_rng((seed, device_index, index))
    h2 = -np.log1p(-rng.random((stop - start, num_subcarriers)))
    active = h2 >= g
    with np.errstate(divide="ignore"):
        tx = np.where(active, rho / (gain * h2), 0.0)
    rx = gain * h2[active] * tx[active]

    count = active.sum(axis=1).astype(np.float64)
    tx_slot = tx.sum(axis=1)
    tx_mean = tx_slot / num_subcarriers
    sums = [
        math.fsum(count),
        math.fsum(count**2),
        math.fsum(tx_mean),
        math.fsum(tx_mean**2),
        math.fsum(rx),
        math.fsum(rx**2),
    ]
    trace = np.stack([np.arange(start, stop), count, tx_slot], axis=1) if keep_trace else None
    return sums, trace


def _mean_se(total: float, total_sq: float, n: float) -> tuple[float, float]:
    mean = total / n
    if n < 2:
        return mean, math.nan
    var = max(total_sq / n - mean**2, 0.0) * n / (n - 1)
    return mean, math.sqrt(var / n)


def simulate_device(
    cfg: SystemConfig,
    dev: DeviceProfile,
    o: float,
    g: float,
    tau: float,
    opts: SimOptions | None = None,
    device_index: int = 0,
) -> SimStats:
    """Simulate the uplink of one device.

    Parameters
    ----------
    cfg, dev: system and device description.
    o, g, tau: compression ratio, truncation threshold and time share.
    opts: Monte Carlo settings.
    device_index: selects the random streams, so devices are independent.
    """
    opts = opts or SimOptions()
    if not g > 0 or not tau > 0:
        raise DomainError("The simulator needs g > 0 and tau > 0.")
    rho = received_power(cfg, dev, g)
    M = cfg.num_subcarriers
    chunks = [
        (i, lo, min(lo + opts.chunk_slots, opts.num_slots))
        for i, lo in enumerate(range(0, opts.num_slots, opts.chunk_slots))
    ]
    keep_trace = opts.trace_file is not None
    results = run_parallel(
        _simulate_chunk,
        chunks,
        opts.n_jobs,
        opts.seed,
        device_index,
        M,
        g,
        rho,
        path_gain(cfg, dev),
        keep_trace,
    )
    sums = [math.fsum(r[0][i] for r in results) for i in range(6)]
    n = float(opts.num_slots)

    mean_count, se_count = _mean_se(sums[0], sums[1], n)
    mean_tx, se_tx = _mean_se(sums[2], sums[3], n)
    if sums[0] > 0:
        mean_rx, se_rx = _mean_se(sums[4], sums[5], sums[0])
    else:
        mean_rx, se_rx = 0.0, math.nan

    if mean_count > 0:
        delay = (
            dev.image_count * cfg.source_size * o / mean_count
        ) * cfg.symbol_duration / tau
        se_delay = delay * se_count / mean_count
    else:
        delay, se_delay = math.inf, math.nan

    if keep_trace:
        trace = np.concatenate([r[1] for r in results])
        path = Path(opts.trace_file)
        if device_index:
            path = path.with_name(f"{path.stem}_dev{device_index}{path.suffix}")
        pd.DataFrame(
            {
                "slot": trace[:, 0].astype(np.int64),
                "active_count": trace[:, 1].astype(np.int64),
                "tx_power_sum": trace[:, 2],
            }
        ).to_csv(path, index=False)
        log.info("Slot trace written to %s", path)

    return SimStats(
        empirical_active_ratio=mean_count / M,
        empirical_mean_tx_power=mean_tx,
        empirical_rx_power=mean_rx,
        empirical_symbols_per_slot=mean_count,
        empirical_tx_delay=delay,
        se_active_ratio=se_count / M,
        se_mean_tx_power=se_tx,
        se_rx_power=se_rx,
        se_symbols_per_slot=se_count,
        se_tx_delay=se_delay,
        num_slots=opts.num_slots,
    )


def validate_allocation(
    cfg: SystemConfig,
    devices: Sequence[DeviceProfile],
    allocation: Allocation,
    opts: SimOptions | None = None,
) -> list[DeviceValidation]:
    """Compare simulated and analytic transmission delays of every device.

    A device passes if the gap is within three standard errors and, with at
    least 1e5 slots, within 2% relative.
    """
    opts = opts or SimOptions()
    out = []
    for k, (dev, row) in enumerate(zip(devices, allocation, strict=True)):
        stats = simulate_device(cfg, dev, row.o, row.g, row.tau, opts, device_index=k)
        analytic = transmit_latency(cfg, dev, row.o, row.g, row.tau)
        gap = abs(stats.empirical_tx_delay - analytic)
        rel = gap / analytic
        if stats.se_tx_delay > 0:
            z = gap / stats.se_tx_delay
        else:
            z = 0.0 if rel <= EXACT_RTOL else math.inf
        passed = z <= N_SIGMA
        if opts.num_slots >= MIN_SLOTS_FOR_RTOL:
            passed = passed and rel <= DELAY_RTOL
        log.info(
            "device %d: simulated %.6g s, analytic %.6g s (z=%.2f)",
            k,
            stats.empirical_tx_delay,
            analytic,
            z,
        )
        out.append(
            DeviceValidation(
                stats=stats, analytic_tx_delay=analytic, rel_error=rel, z_score=z, passed=passed
            )
        )
    return out
