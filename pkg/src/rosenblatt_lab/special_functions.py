"""Gamma, beta and power-sum helpers.

``math.lgamma`` is accurate to a few ulps in absolute terms but loses
relative accuracy next to its zeros at 1 and 2, so a Taylor series in
zeta values takes over there.
"""

from __future__ import annotations

import math

from scipy import special

from .errors import DomainError

_EULER = 0.57721566490153286061

# zeta(k) for k = 2..40, used by the series of lgamma(1 + e)
_ZETA = [float(special.zeta(k, 1)) for k in range(2, 41)]

_SERIES_RADIUS = 0.2


def _lgamma1p(e: float) -> float:
    """ln Gamma(1 + e) for |e| <= 0.2."""
    total = -_EULER * e
    power = -e
    for k, z in enumerate(_ZETA, start=2):
        power *= -e
        term = z * power / k
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise DomainError(f"log_gamma needs a finite positive argument, got {x}")
    if abs(x - 1.0) <= _SERIES_RADIUS:
        return _lgamma1p(x - 1.0)
    if abs(x - 2.0) <= _SERIES_RADIUS:
        e = x - 2.0
        return math.log1p(e) + _lgamma1p(e)
    return math.lgamma(x)


def log_beta(x: float, y: float) -> float:
    if not (x > 0 and y > 0):
        raise DomainError(f"beta arguments must be positive, got ({x}, {y})")
    return log_gamma(x) + log_gamma(y) - log_gamma(x + y)


def beta_fn(x: float, y: float) -> float:
    """Euler beta function B(x, y).

    Arguments below 1e-8 go through ``(1/x) * exp(ln Gamma(1+x) + ...)``
    so the pole is factored out before exponentiating.
    """
    x, y = float(x), float(y)
    if not (x > 0 and y > 0):
        raise DomainError(f"beta arguments must be positive, got ({x}, {y})")
    if x > y:
        x, y = y, x
    if x < 1e-8:
        return math.exp(log_gamma(1.0 + x) + log_gamma(y) - log_gamma(x + y)) / x
    return math.exp(log_beta(x, y))


def power_tail_sum(gamma: float, start: int) -> float:
    """Sum of i**gamma for i >= start, gamma < -1.

    This is the Hurwitz zeta function zeta(-gamma, start).
    """
    if not gamma < -1:
        raise DomainError(f"power_tail_sum diverges for gamma >= -1, got {gamma}")
    if int(start) != start or start < 1:
        raise DomainError(f"start must be a positive integer, got {start}")
    return float(special.zeta(-gamma, int(start)))
