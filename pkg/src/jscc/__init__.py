"""JSCC latency planning package."""

from .core import DeviceProfile, SystemConfig, get_planner

__all__ = ["DeviceProfile", "SystemConfig", "get_planner"]
