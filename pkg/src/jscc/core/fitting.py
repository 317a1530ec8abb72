"""Fitting of the logistic SSIM model."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from functools import cache

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import least_squares
from scipy.special import expit

from .exceptions import FitError
from .system import LogisticParams

log = logging.getLogger(__name__)

MIN_SAMPLES = 6
MIN_SSIM_SPREAD = 0.05

#: SNR grid (dB) of the synthetic anchor points behind the default table.
ANCHOR_SNR_DB = np.arange(-10.0, 20.5, 1.0)


def anchor_params(o: float) -> LogisticParams:
    """Placeholder SSIM model of compression ratio ``o``.

    The asymptotes grow with the compression ratio and every curve increases
    with the SNR. These are not measured values.
    """
    return LogisticParams(
        a1=min(0.25 + 1.2 * o, 0.6),
        a2=min(0.92 + 0.33 * o, 0.99),
        c1=0.19 + 0.18 * o,
        c2=-0.6 + 5.4 * o,
    )


def _design(snr_db: NDArray, c1: float, c2: float) -> NDArray:
    s = expit(c1 * snr_db + c2)
    return np.stack([1 - s, s], axis=1)


def _profile(snr_db: NDArray, ssim: NDArray, c1: float, c2: float) -> tuple:
    """Solve the linear part for fixed slope/offset, return (a1, a2, rss)."""
    design = _design(snr_db, c1, c2)
    (a1, a2), *_ = np.linalg.lstsq(design, ssim, rcond=None)
    res = design @ np.array([a1, a2]) - ssim
    return a1, a2, float(res @ res)


def fit_logistic(
    samples: Sequence[tuple[float, float]] | NDArray,
    n_slopes: int = 40,
    n_centers: int = 41,
    n_refine: int = 3,
) -> LogisticParams:
    """Fit the logistic SSIM model to (snr_db, ssim) samples.

    For a fixed slope and offset the model is linear in the asymptotes, which
    are then obtained by linear least squares. Slope and offset are searched on
    a coarse grid (slope on a log scale, curve center across the sampled
    range), then the best candidates are refined jointly with
    Levenberg-Marquardt.

    Parameters
    ----------
    samples: array-like of shape (n, 2)
        Pairs of SNR (dB) and SSIM.
    n_slopes, n_centers: int
        Size of the coarse grid.
    n_refine: int
        Number of grid candidates refined locally.

    Returns
    -------
    LogisticParams

    Raises
    ------
    FitError
        Too few samples, no SSIM spread, or a degenerate fitted curve.
    """
    data = np.asarray(samples, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 2 or len(data) < MIN_SAMPLES:
        raise FitError(f"At least {MIN_SAMPLES} (snr_db, ssim) samples are required.")
    snr_db, ssim = data[:, 0], data[:, 1]
    if np.ptp(ssim) < MIN_SSIM_SPREAD:
        raise FitError("Samples do not span both tails of the SSIM curve.")

    span = max(np.ptp(snr_db), 1.0)
    slopes = np.logspace(np.log10(0.2 / span), np.log10(40 / span), n_slopes)
    centers = np.linspace(snr_db.min() - span / 2, snr_db.max() + span / 2, n_centers)
    grid = []
    for c1 in slopes:
        for center in centers:
            c2 = -c1 * center
            a1, a2, rss = _profile(snr_db, ssim, c1, c2)
            grid.append((rss, a1, a2, c1, c2))
    grid.sort(key=lambda row: row[0])

    def residuals(theta: NDArray) -> NDArray:
        a1, a2, c1, c2 = theta
        return a1 + (a2 - a1) * expit(c1 * snr_db + c2) - ssim

    best_rss, best = grid[0][0], np.array(grid[0][1:])
    for _, *start in grid[:n_refine]:
        res = least_squares(
            residuals, np.array(start), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15
        )
        rss = float(res.fun @ res.fun)
        if rss < best_rss:
            best_rss, best = rss, res.x
    log.debug("Logistic fit residual sum of squares: %g", best_rss)

    a1, a2, c1, c2 = (float(v) for v in best)
    if c1 < 0:
        # same curve, mirrored parametrisation.
        a1, a2, c1, c2 = a2, a1, -c1, -c2
    if a2 <= a1:
        raise FitError(f"Fitted curve is degenerate (a1={a1:.4g}, a2={a2:.4g}).")
    try:
        return LogisticParams(a1=a1, a2=a2, c1=c1, c2=c2)
    except ValueError as e:
        raise FitError(str(e)) from e


def logistic_samples(params: LogisticParams, snr_db: NDArray) -> NDArray:
    """Evaluate the model on a SNR grid, as (snr_db, ssim) rows."""
    snr_db = np.asarray(snr_db, dtype=np.float64)
    ssim = params.a1 + (params.a2 - params.a1) * expit(params.c1 * snr_db + params.c2)
    return np.stack([snr_db, ssim], axis=1)


@cache
def default_logistic_table(catalog: tuple[float, ...]) -> tuple[LogisticParams, ...]:
    """Build the placeholder logistic table of a compression ratio catalog.

    Each entry is fitted on noiseless anchor points of :func:`anchor_params`.
    """
    log.debug("Fitting default logistic table for catalog %s", catalog)
    return tuple(
        fit_logistic(logistic_samples(anchor_params(o), ANCHOR_SNR_DB))
        for o in catalog
    )
