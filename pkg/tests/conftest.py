"""Shared fixtures of the test suite."""

from pytest_cases import fixture

from jscc.core import DeviceProfile, SystemConfig
from jscc.toolkit.experiments import ScenarioSpec, generate_scenario


@fixture(scope="session")
def system() -> SystemConfig:
    return SystemConfig()


@fixture(scope="session")
def device() -> DeviceProfile:
    return DeviceProfile(image_count=4, local_cpu=1.5e9, distance=50.0, ssim_req=0.85)


@fixture(scope="session")
def scenario() -> tuple[SystemConfig, list[DeviceProfile]]:
    """Three random devices with the default system."""
    return generate_scenario(ScenarioSpec(K=3, seed=0))
