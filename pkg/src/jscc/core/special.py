"""Exponential integral and its inverse.

The power constraint of truncated channel inversion involves the first
exponential integral

.. math::

    E_1(g) = \\int_g^{\\infty} \\frac{e^{-t}}{t} dt

which is strictly decreasing on :math:`(0, \\infty)` and diverges at 0.
"""

from __future__ import annotations

import math
import sys

from scipy.integrate import quad
from scipy.optimize import bisect

from .exceptions import DomainError

EULER_GAMMA = 0.57721566490153286061

#: Default relative tolerance of the threshold bisection.
DEFAULT_EPSILON2 = 1e-10

_MAX_ITER = 500
_FPMIN = 1e-300
_EPS = 1e-16

# ln of the smallest threshold the bisection explores. Below it
# E1(d) = -gamma - ln d up to O(d), which is inverted in closed form.
_LOG_D_MIN = -700.0
# E1(e^6) ~ 1e-178, well inside the normal range.
_LOG_D_MAX = 6.0


def exp_integral_e1(g: float) -> float:
    """Evaluate the first exponential integral :math:`E_1(g)`.

    Uses the power series below 1 and a continued fraction (modified Lentz)
    above.

    Parameters
    ----------
    g: float
        Strictly positive argument.

    Returns
    -------
    float
        :math:`\\int_g^\\infty e^{-t}/t\\,dt`

    Raises
    ------
    DomainError
        If ``g <= 0``, where the integral diverges.
    """
    g = float(g)
    if not g > 0:
        raise DomainError(f"E1 is only defined for g > 0, got {g}.")
    if g < 1.0:
        # E1(g) = -gamma - ln g - sum_{n>=1} (-g)^n / (n n!)
        total = 0.0
        term = 1.0
        for n in range(1, _MAX_ITER):
            term *= -g / n
            contrib = term / n
            total += contrib
            if abs(contrib) < abs(total) * _EPS:
                break
        return -EULER_GAMMA - math.log(g) - total

    b = g + 1.0
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        a = -i * i
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise DomainError(f"Continued fraction of E1 did not converge at g={g}.")
    return h * math.exp(-g)


def exp_integral_e1_quad(g: float) -> float:
    """Evaluate :math:`E_1(g)` by adaptive quadrature.

    Slow reference used to validate :func:`exp_integral_e1`. With
    :math:`t = g e^s` the integral becomes
    :math:`e^{-g} \\int_0^\\infty \\exp(-g (e^s - 1)) ds`, whose integrand is
    smooth and bounded by one.
    """
    g = float(g)
    if not g > 0:
        raise DomainError(f"E1 is only defined for g > 0, got {g}.")
    # past this point the integrand is below exp(-745).
    s_max = math.log1p(745.0 / g)
    knots = [s for s in (math.log1p(1.0 / g), math.log1p(10.0 / g)) if s < s_max]
    value, _ = quad(
        lambda s: math.exp(-g * math.expm1(s)),
        0.0,
        s_max,
        points=knots or None,
        epsabs=0.0,
        epsrel=1e-14,
        limit=500,
    )
    return math.exp(-g) * value


def min_threshold(c: float, epsilon2: float = DEFAULT_EPSILON2) -> float:
    """Solve :math:`E_1(d) = c` for the truncation threshold ``d``.

    Bisection runs on :math:`u = \\ln d`, so ``epsilon2`` is a relative
    tolerance on ``d``. Since :math:`E_1` is strictly decreasing, any
    threshold ``g >= d`` satisfies :math:`E_1(g) \\le c`.

    Targets beyond :math:`E_1(e^{-700})` use :math:`d = e^{-\\gamma - c}`,
    clamped to the smallest normal double. The clamped threshold is larger
    than the exact one and still satisfies :math:`E_1(d) \\le c`.

    Parameters
    ----------
    c: float
        Target value, strictly positive.
    epsilon2: float
        Relative tolerance on the returned threshold.

    Raises
    ------
    DomainError
        If ``c <= 0``.
    """
    c = float(c)
    if not c > 0:
        raise DomainError(f"Threshold target must be positive, got {c}.")
    log_c = math.log(c)

    def residual(u: float) -> float:
        e1 = exp_integral_e1(math.exp(u))
        return math.log(e1) - log_c if e1 > 0 else -math.inf

    lo = _LOG_D_MIN
    if residual(lo) < 0:
        return max(math.exp(-EULER_GAMMA - c), sys.float_info.min)
    hi = 0.0
    while residual(hi) > 0:
        lo = hi
        hi += 1.0
        if hi > _LOG_D_MAX:
            raise DomainError(f"Threshold target {c} is too small.")
    u = bisect(residual, lo, hi, xtol=epsilon2, maxiter=400)
    return math.exp(u)
