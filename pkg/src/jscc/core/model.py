"""Closed-form delay, channel and quality model of one uplink device.

Conventions: powers in watts, SNR handed to the SSIM model in dB, delays in
seconds. Transmission delays use the batch form, i.e. they include the
image count of the device.
"""

from __future__ import annotations

import math

from scipy.special import expit

from .allocation import AllocationRow
from .exceptions import DomainError, UnsatisfiableError
from .special import DEFAULT_EPSILON2, exp_integral_e1, min_threshold
from .system import DeviceProfile, LogisticParams, SystemConfig, linear_to_db


def active_ratio(g: float) -> float:
    """Probability that a sub-channel survives truncation, :math:`e^{-g}`."""
    if g < 0:
        raise DomainError(f"Truncation threshold must be non-negative, got {g}.")
    return math.exp(-g)


def path_gain(cfg: SystemConfig, dev: DeviceProfile) -> float:
    """Large scale gain :math:`r^{-\\alpha}`."""
    return dev.distance ** (-cfg.path_loss_exp)


def received_power(cfg: SystemConfig, dev: DeviceProfile, g: float) -> float:
    """Largest received power per symbol allowed by the power budget.

    .. math:: \\rho = \\frac{P}{M r^\\alpha E_1(g)}
    """
    if not g > 0:
        raise DomainError(f"Received power needs a positive threshold, got {g}.")
    return (
        dev.tx_power
        * path_gain(cfg, dev)
        / (cfg.num_subcarriers * exp_integral_e1(g))
    )


def received_snr_db(cfg: SystemConfig, dev: DeviceProfile, g: float) -> float:
    """Received SNR in dB, :math:`10 \\log_{10}(\\rho / \\sigma^2)`."""
    return linear_to_db(received_power(cfg, dev, g) / cfg.noise_power)


def ssim_model(params: LogisticParams, snr_db: float) -> float:
    """Logistic SSIM as a function of SNR in dB."""
    return params.a1 + (params.a2 - params.a1) * float(
        expit(params.c1 * snr_db + params.c2)
    )


def required_snr_db(params: LogisticParams, eta: float) -> float:
    """Smallest SNR (dB) whose SSIM reaches ``eta``.

    Raises
    ------
    UnsatisfiableError
        If ``eta`` lies outside the open interval (a1, a2).
    """
    if not params.covers(eta):
        raise UnsatisfiableError(
            f"SSIM {eta} is outside ({params.a1}, {params.a2}) of the model."
        )
    return -(math.log((params.a2 - eta) / (eta - params.a1)) + params.c2) / params.c1


def cutoff_ceiling(
    cfg: SystemConfig, dev: DeviceProfile, params: LogisticParams
) -> float:
    """Largest value of :math:`E_1(g)` compatible with the SSIM requirement.

    .. math:: c = \\frac{P}{M r^\\alpha \\sigma^2} 10^{-\\gamma_{req}/10}
    """
    gamma_req = required_snr_db(params, dev.ssim_req)
    return (
        dev.tx_power
        * path_gain(cfg, dev)
        / (cfg.num_subcarriers * cfg.noise_power)
        / 10 ** (gamma_req / 10)
    )


def device_threshold(
    cfg: SystemConfig,
    dev: DeviceProfile,
    o: float,
    epsilon2: float = DEFAULT_EPSILON2,
) -> float:
    """Smallest truncation threshold meeting the SSIM target at ratio ``o``."""
    return min_threshold(cutoff_ceiling(cfg, dev, cfg.logistic_for(o)), epsilon2)


def local_latency(cfg: SystemConfig, dev: DeviceProfile) -> float:
    """Encoding delay on the device, :math:`L C^l / f^l`."""
    return dev.image_count * cfg.encode_cycles / dev.local_cpu


def transmit_load(cfg: SystemConfig, dev: DeviceProfile, o: float, g: float) -> float:
    """Channel time needed by the batch with the whole frame, in seconds.

    This is the transmission delay at ``tau = 1``.
    """
    return (
        dev.image_count
        * cfg.source_size
        * o
        * math.exp(g)
        * cfg.symbol_duration
        / cfg.num_subcarriers
    )


def transmit_latency(
    cfg: SystemConfig, dev: DeviceProfile, o: float, g: float, tau: float
) -> float:
    """Transmission delay of the batch, :math:`L D_0 o e^g T_s / (M \\tau)`."""
    if not tau > 0:
        raise DomainError(f"Time share must be positive, got {tau}.")
    if g < 0:
        raise DomainError(f"Truncation threshold must be non-negative, got {g}.")
    return transmit_load(cfg, dev, o, g) / tau


def decode_latency(cfg: SystemConfig, dev: DeviceProfile, f_c: float) -> float:
    """Decoding delay at the edge, :math:`L C^d / f^c`."""
    if not f_c > 0:
        raise DomainError(f"Edge CPU share must be positive, got {f_c}.")
    return dev.image_count * cfg.decode_cycles / f_c


def end_to_end_latency(
    cfg: SystemConfig, dev: DeviceProfile, row: AllocationRow
) -> float:
    """Encoding, transmission and decoding delay of one allocation row."""
    return (
        local_latency(cfg, dev)
        + transmit_latency(cfg, dev, row.o, row.g, row.tau)
        + decode_latency(cfg, dev, row.f_c)
    )


def make_row(
    cfg: SystemConfig,
    dev: DeviceProfile,
    o: float,
    g: float,
    tau: float,
    f_c: float,
) -> AllocationRow:
    """Build an allocation row with its latency breakdown."""
    t_l = local_latency(cfg, dev)
    t_t = transmit_latency(cfg, dev, o, g, tau)
    t_c = decode_latency(cfg, dev, f_c)
    return AllocationRow(
        o=o, g=g, tau=tau, f_c=f_c, t_l=t_l, t_t=t_t, t_c=t_c, t_total=t_l + t_t + t_c
    )
