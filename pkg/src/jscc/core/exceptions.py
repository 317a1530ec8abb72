"""Errors raised by the planning engine."""

from __future__ import annotations

from typing import Any


class JSCCError(Exception):
    """Base class of all errors of the package."""


class DomainError(JSCCError, ValueError):
    """An argument lies outside the domain of a formula."""


class UnsatisfiableError(JSCCError, ValueError):
    """A SSIM requirement cannot be met by any finite SNR.

    Parameters
    ----------
    message: str
        Human readable description.
    device: int, optional
        Index of the offending device, if known.
    """

    def __init__(self, message: str, device: int | None = None):
        super().__init__(message)
        self.device = device


class FitError(JSCCError, ValueError):
    """The logistic model could not be fitted to the samples."""


class SchemaError(JSCCError, ValueError):
    """Invalid configuration value, reported with its dotted field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class InfeasibleError(JSCCError, RuntimeError):
    """A planner could not reach a feasible system delay.

    The bisection trace gathered so far is attached for inspection.
    """

    def __init__(self, message: str, trace: list[Any] | None = None):
        super().__init__(message)
        self.trace = trace or []


class OracleRefusalError(JSCCError):
    """The brute force oracle refuses instances larger than its guard."""
