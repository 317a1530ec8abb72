"""Tests of the delay, channel and SSIM model."""

import math
from dataclasses import replace

import numpy as np
import numpy.testing as npt
import pytest
from pytest_cases import parametrize, parametrize_with_cases

from jscc.core import DeviceProfile, LogisticParams, SystemConfig
from jscc.core.exceptions import DomainError, FitError, UnsatisfiableError
from jscc.core.fitting import (
    ANCHOR_SNR_DB,
    anchor_params,
    default_logistic_table,
    fit_logistic,
    logistic_samples,
)
from jscc.core.model import (
    active_ratio,
    cutoff_ceiling,
    decode_latency,
    end_to_end_latency,
    device_threshold,
    local_latency,
    make_row,
    received_power,
    received_snr_db,
    required_snr_db,
    ssim_model,
    transmit_latency,
    transmit_load,
)
from jscc.core.system import (
    CORE_FREQUENCY_HZ,
    dbm_to_watt,
    parse_edge_cpu,
    parse_ratio,
    satisfiable_crs,
    watt_to_dbm,
)


class CasesLogistic:
    def case_anchor(self):
        return anchor_params(1 / 6)

    def case_low_ratio(self):
        return anchor_params(1 / 24)

    def case_steep(self):
        return LogisticParams(a1=0.3, a2=0.97, c1=0.8, c2=-4.0)


@parametrize_with_cases("params", cases=CasesLogistic)
@parametrize(frac=[0.05, 0.5, 0.95])
def test_required_snr_inverts_ssim(params: LogisticParams, frac: float):
    eta = params.a1 + frac * (params.a2 - params.a1)
    gamma = required_snr_db(params, eta)
    npt.assert_allclose(ssim_model(params, gamma), eta, rtol=0, atol=1e-12)


@parametrize_with_cases("params", cases=CasesLogistic)
def test_ssim_increasing(params: LogisticParams):
    values = [ssim_model(params, s) for s in np.linspace(-20, 30, 51)]
    assert np.all(np.diff(values) > 0)


@parametrize(eta=[0.1, 0.999])
def test_required_snr_out_of_range(eta: float):
    with pytest.raises(UnsatisfiableError):
        required_snr_db(anchor_params(1 / 6), eta)


def test_active_ratio():
    assert active_ratio(0.0) == 1.0
    npt.assert_allclose(active_ratio(math.log(2)), 0.5)
    with pytest.raises(DomainError):
        active_ratio(-0.1)


def test_threshold_meets_ssim(system: SystemConfig, device: DeviceProfile):
    for o in satisfiable_crs(system, device):
        d = device_threshold(system, device, o)
        params = system.logistic_for(o)
        ssim = ssim_model(params, received_snr_db(system, device, d))
        npt.assert_allclose(ssim, device.ssim_req, rtol=1e-7)
        # a larger threshold lowers E1, hence raises the received SNR
        assert ssim_model(params, received_snr_db(system, device, 1.5 * d)) > device.ssim_req


def test_cutoff_ceiling_scales_with_power(system: SystemConfig, device: DeviceProfile):
    params = system.logistic_for(system.max_cr)
    stronger = replace(device, tx_power=2 * device.tx_power)
    npt.assert_allclose(
        cutoff_ceiling(system, stronger, params),
        2 * cutoff_ceiling(system, device, params),
    )


def test_latency_breakdown(system: SystemConfig, device: DeviceProfile):
    o, g, tau, f_c = system.max_cr, 0.2, 0.25, 1e9
    row = make_row(system, device, o, g, tau, f_c)
    npt.assert_allclose(row.t_l, device.image_count * system.encode_cycles / device.local_cpu)
    npt.assert_allclose(row.t_t, transmit_load(system, device, o, g) / tau)
    npt.assert_allclose(row.t_c, device.image_count * system.decode_cycles / f_c)
    npt.assert_allclose(row.t_total, row.t_l + row.t_t + row.t_c)
    npt.assert_allclose(end_to_end_latency(system, device, row), row.t_total, rtol=1e-14)
    assert row.t_l == local_latency(system, device)
    assert row.t_c == decode_latency(system, device, f_c)


def test_transmit_latency_formula(system: SystemConfig, device: DeviceProfile):
    o, g, tau = 1 / 8, 0.7, 0.5
    expected = (
        device.image_count
        * 3 * system.image_height * system.image_width
        * o * math.exp(g) * system.symbol_duration
        / (system.num_subcarriers * tau)
    )
    npt.assert_allclose(transmit_latency(system, device, o, g, tau), expected, rtol=1e-14)


@parametrize(tau=[0.0, -0.5])
def test_transmit_latency_domain(system: SystemConfig, device: DeviceProfile, tau: float):
    with pytest.raises(DomainError):
        transmit_latency(system, device, system.max_cr, 0.1, tau)


def test_decode_latency_domain(system: SystemConfig, device: DeviceProfile):
    with pytest.raises(DomainError):
        decode_latency(system, device, 0.0)


def test_unit_conversions():
    npt.assert_allclose(dbm_to_watt(30), 1.0)
    npt.assert_allclose(dbm_to_watt(-80), 1e-11)
    npt.assert_allclose(watt_to_dbm(0.1), 20.0)
    assert parse_ratio("1/6") == pytest.approx(1 / 6)
    assert parse_ratio(0.25) == 0.25
    assert parse_edge_cpu("200%") == pytest.approx(2 * CORE_FREQUENCY_HZ)
    assert parse_edge_cpu(3e9) == 3e9


def test_system_validation():
    with pytest.raises(ValueError):
        SystemConfig(cr_catalog=(1 / 12, 1 / 6))
    with pytest.raises(ValueError):
        SystemConfig(cr_catalog=(1 / 6,), logistic_table=(anchor_params(0.1), anchor_params(0.2)))
    with pytest.raises(ValueError):
        DeviceProfile(image_count=0, local_cpu=1e9)
    with pytest.raises(DomainError):
        SystemConfig().cr_index(0.3)


def test_default_table_is_increasing_in_ratio():
    catalog = SystemConfig().cr_catalog
    table = default_logistic_table(catalog)
    assert len(table) == len(catalog)
    # larger ratios reach a higher SSIM at every SNR
    for hi, lo in zip(table[:-1], table[1:]):
        assert all(ssim_model(hi, s) > ssim_model(lo, s) for s in ANCHOR_SNR_DB)


@parametrize_with_cases("params", cases=CasesLogistic)
def test_fit_noiseless(params: LogisticParams):
    fit = fit_logistic(logistic_samples(params, np.arange(-10.0, 20.5, 0.5)))
    npt.assert_allclose(
        [fit.a1, fit.a2, fit.c1, fit.c2],
        [params.a1, params.a2, params.c1, params.c2],
        rtol=1e-5,
        atol=1e-6,
    )


def test_fit_noisy():
    truth = LogisticParams(a1=0.4, a2=0.95, c1=0.3, c2=-1.5)
    rng = np.random.default_rng(3)
    samples = logistic_samples(truth, np.tile(np.arange(-10.0, 20.5, 1.0), 200))
    samples[:, 1] += rng.normal(0.0, 0.002, len(samples))
    fit = fit_logistic(samples)
    npt.assert_allclose([fit.a1, fit.a2, fit.c1], [truth.a1, truth.a2, truth.c1], rtol=0.01)
    npt.assert_allclose(fit.c2, truth.c2, atol=0.015)


def test_fit_rejects_bad_samples():
    with pytest.raises(FitError):
        fit_logistic([(0.0, 0.5), (1.0, 0.6)])
    flat = np.stack([np.arange(10.0), np.full(10, 0.8)], axis=1)
    with pytest.raises(FitError):
        fit_logistic(flat)


def test_worked_examples():
    system = SystemConfig()
    near = DeviceProfile(image_count=1, local_cpu=1e9, distance=1.0)
    npt.assert_allclose(
        received_power(system, near, 1.0), 0.1 / (256 * 0.21938393439552029), rtol=1e-12
    )
    batch = DeviceProfile(image_count=5, local_cpu=1e9)
    npt.assert_allclose(local_latency(system, batch), 5 * 2170 * 16384 / 1e9, rtol=1e-14)
    npt.assert_allclose(decode_latency(system, batch, 4.9e9), 0.041963, rtol=1e-4)
    npt.assert_allclose(transmit_latency(system, near, 1 / 12, 0.0, 1.0), 16 / 15000, rtol=1e-14)
    params = LogisticParams(a1=0.5, a2=0.95, c1=0.3, c2=0.0)
    npt.assert_allclose(ssim_model(params, 10.0), 0.5 + 0.45 / (1 + math.exp(-3)), rtol=1e-12)
    npt.assert_allclose(required_snr_db(params, 0.9), math.log(8) / 0.3, rtol=1e-12)
    npt.assert_allclose(required_snr_db(params, 0.9), 6.9315, rtol=1e-4)
    # midpoint SSIM shifted to 20 dB
    at_20db = LogisticParams(a1=0.5, a2=0.95, c1=0.3, c2=-6.0)
    dev = DeviceProfile(image_count=1, local_cpu=1e9, distance=50.0, ssim_req=0.725)
    npt.assert_allclose(cutoff_ceiling(system, dev, at_20db), 3.125, rtol=1e-12)


@parametrize(scale=[2, 3, 7])
def test_transmit_latency_homogeneous_in_images(system: SystemConfig, scale: int):
    dev = DeviceProfile(image_count=2, local_cpu=1e9)
    more = replace(dev, image_count=scale * dev.image_count)
    o, g, tau = system.max_cr, 0.4, 0.3
    npt.assert_allclose(
        transmit_latency(system, more, o, g, tau),
        scale * transmit_latency(system, dev, o, g, tau),
        rtol=1e-14,
    )


def test_transmit_latency_monotone(system: SystemConfig, device: DeviceProfile):
    o = system.max_cr
    gs = np.linspace(0.0, 3.0, 31)
    in_g = [transmit_latency(system, device, o, g, 0.5) for g in gs]
    assert np.all(np.diff(in_g) > 0)
    npt.assert_allclose(
        transmit_latency(system, device, o, math.log(2), 0.5),
        2 * transmit_latency(system, device, o, 0.0, 0.5),
    )
    taus = np.linspace(0.05, 1.0, 20)
    in_tau = [transmit_latency(system, device, o, 0.5, t) for t in taus]
    assert np.all(np.diff(in_tau) < 0)
    loads = [
        transmit_latency(system, replace(device, image_count=n), o, 0.5, 0.5)
        for n in range(1, 8)
    ]
    assert np.all(np.diff(loads) > 0)
