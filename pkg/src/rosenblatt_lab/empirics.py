"""Sample statistics for comparing simulations with analytic predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import DomainError, SizeError

JACKKNIFE_BLOCKS = 32


@dataclass(frozen=True)
class SampleStats:
    k2: float
    k3: float
    k4: float
    k6: float
    se2: float
    se3: float
    se4: float
    se6: float
    n: int

    def value(self, m: int) -> float:
        return getattr(self, f"k{m}")

    def se(self, m: int) -> float:
        return getattr(self, f"se{m}")


def _cumulants_from_sums(n, s):
    """k2, k3, k4 and a moment-based kappa_6 from power sums s[1..6]."""
    n = float(n)
    s1, s2, s3, s4 = s[1], s[2], s[3], s[4]
    k2 = (n * s2 - s1**2) / (n * (n - 1))
    k3 = (2 * s1**3 - 3 * n * s1 * s2 + n**2 * s3) / (n * (n - 1) * (n - 2))
    k4 = (
        -6 * s1**4
        + 12 * n * s1**2 * s2
        - 3 * n * (n - 1) * s2**2
        - 4 * n * (n + 1) * s1 * s3
        + n**2 * (n + 1) * s4
    ) / (n * (n - 1) * (n - 2) * (n - 3))
    # central moments from raw moments
    raw = [s[r] / n for r in range(7)]
    mu = raw[1]
    cm = [sum(math.comb(r, i) * raw[i] * (-mu) ** (r - i) for i in range(r + 1)) for r in range(7)]
    k6 = cm[6] - 15 * cm[4] * cm[2] - 10 * cm[3] ** 2 + 30 * cm[2] ** 3
    return np.array([k2, k3, k4, k6])


def _block_labels(x: np.ndarray, blocks: int) -> np.ndarray:
    """Pseudo-random block membership that depends only on the value."""
    bits = np.ascontiguousarray(x, dtype=np.float64).view(np.uint64)
    h = bits * np.uint64(0x9E3779B97F4A7C15)
    h ^= h >> np.uint64(29)
    h *= np.uint64(0xBF58476D1CE4E5B9)
    h ^= h >> np.uint64(32)
    return (h % np.uint64(blocks)).astype(np.int64)


def k_statistics(sample: Sequence[float]) -> SampleStats:
    """k-statistics k2..k4, a central-moment kappa_6 and jackknife errors.

    The sample is sorted and centred first, so the estimates do not depend
    on the order of the input.  Jackknife blocks are assigned by hashing
    values, which keeps the standard errors order independent too.
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    if n < 8:
        raise SizeError(f"k-statistics need at least 8 observations, got {n}")
    if not np.all(np.isfinite(x)):
        raise DomainError("sample contains non-finite values")
    shift = math.fsum(x) / n
    y = x - shift
    powers = np.vstack([y**r for r in range(7)])
    total = powers.sum(axis=1)
    est = _cumulants_from_sums(n, total)

    labels = _block_labels(x, JACKKNIFE_BLOCKS)
    block_sums = np.zeros((JACKKNIFE_BLOCKS, 7))
    for r in range(7):
        block_sums[:, r] = np.bincount(labels, weights=powers[r], minlength=JACKKNIFE_BLOCKS)
    sizes = np.bincount(labels, minlength=JACKKNIFE_BLOCKS)
    leave = []
    for b in range(JACKKNIFE_BLOCKS):
        nb = n - sizes[b]
        if sizes[b] == 0 or nb < 8:
            continue
        leave.append(_cumulants_from_sums(nb, total - block_sums[b]))
    leave = np.array(leave)
    g = len(leave)
    if g >= 2:
        se = np.sqrt((g - 1) / g * ((leave - leave.mean(axis=0)) ** 2).sum(axis=0))
    else:
        se = np.full(4, np.nan)
    return SampleStats(*est, *se, n)


def empirical_cf(sample: Sequence[float], u: float) -> tuple[float, float, float]:
    """Mean of exp(iux) as (real, imaginary, standard error of the complex mean)."""
    x = np.asarray(sample, dtype=float).ravel()
    c, s = np.cos(u * x), np.sin(u * x)
    n = x.size
    re, im = float(c.mean()), float(s.mean())
    if n < 2:
        return re, im, 0.0
    se = math.sqrt((c.var(ddof=1) + s.var(ddof=1)) / n)
    return re, im, se


def wasserstein1(a: Sequence[float], b: Sequence[float]) -> float:
    """Empirical Wasserstein-1 distance between two samples."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == b.size:
        return float(np.mean(np.abs(a - b)))
    return float(stats.wasserstein_distance(a, b))


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of log y against log x, with its standard error."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size or x.size < 3:
        raise SizeError("loglog_slope needs at least 3 paired points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("loglog_slope needs positive values")
    lx, ly = np.log(x), np.log(y)
    lx_c = lx - lx.mean()
    sxx = float(lx_c @ lx_c)
    if sxx == 0:
        raise DomainError("x values must not all coincide")
    slope = float(lx_c @ (ly - ly.mean())) / sxx
    resid = ly - ly.mean() - slope * lx_c
    dof = x.size - 2
    se = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else 0.0
    return slope, se
