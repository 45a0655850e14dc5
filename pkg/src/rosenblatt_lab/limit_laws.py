"""Boundary limit laws: cumulants, characteristic functions, samplers and rates.

Near the edges and corners of the triangle the standardized process
converges to one of

* Brownian motion (diagonal edge),
* ``W * B_H(t)`` with ``W`` standard normal independent of fBm ``B_H``,
  ``H = gamma + 3/2`` (edges ``gamma_i = -1/2``),
* ``X_rho(t) = sqrt(rho) W B(t) + sqrt(1 - rho) B'(t)`` (corner (-1/2, -1)),
* ``Y_rho(t) = t (a X_1 + b X_2)`` with standardized chi-square ``X_i``
  (corner (-1/2, -1/2)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import ExponentPair, LinearCombo
from .errors import DomainError, RangeError
from .paths import PathEnsemble

PATH_BLOCK = 256


class LawKind(enum.Enum):
    BROWNIAN_MOTION = "BrownianMotion"
    PRODUCT_FBM = "ProductFbm"
    CORNER_X = "CornerX"
    CORNER_Y = "CornerY"


@dataclass(frozen=True)
class LimitLaw:
    kind: LawKind
    gamma: float | None = None
    rho: float | None = None

    def __post_init__(self):
        if self.kind is LawKind.PRODUCT_FBM:
            if self.gamma is None or not -1.0 <= self.gamma < -0.5:
                raise DomainError(f"ProductFbm needs gamma in [-1, -1/2), got {self.gamma}")
        if self.kind in (LawKind.CORNER_X, LawKind.CORNER_Y):
            if self.rho is None or not 0.0 <= self.rho <= 1.0:
                raise RangeError(f"{self.kind.value} needs rho in [0, 1], got {self.rho}")

    def hurst(self) -> float:
        return self.gamma + 1.5 if self.kind is LawKind.PRODUCT_FBM else 0.5

    def __str__(self) -> str:
        if self.kind is LawKind.PRODUCT_FBM:
            return f"ProductFbm(gamma={self.gamma:g})"
        if self.rho is not None:
            return f"{self.kind.value}(rho={self.rho:g})"
        return self.kind.value


def fbm_covariance(H: float, s: float, t: float) -> float:
    if not 0 < H <= 1:
        raise DomainError(f"Hurst index must lie in (0, 1], got {H}")
    if s < 0 or t < 0:
        raise DomainError("times must be nonnegative")
    return 0.5 * (s ** (2 * H) + t ** (2 * H) - abs(s - t) ** (2 * H))


def _combo_variance(combo: LinearCombo, H: float) -> float:
    c, t = combo.coeffs, combo.times
    cov = 0.5 * (t[:, None] ** (2 * H) + t[None, :] ** (2 * H) - np.abs(t[:, None] - t[None, :]) ** (2 * H))
    return float(c @ cov @ c)


def _check_order(m: int, low: int = 2) -> None:
    if int(m) != m or m < low:
        raise RangeError(f"cumulant order must be an integer >= {low}, got {m}")


def kappa_limit_edge(m: int, combo: LinearCombo, gamma: float) -> float:
    """Cumulants of sum c_i W B_H(t_i) with H = gamma + 3/2."""
    _check_order(m)
    if not -1.0 <= gamma < -0.5:
        raise DomainError(f"edge gamma must lie in [-1, -1/2), got {gamma}")
    if m % 2:
        return 0.0
    return math.factorial(m - 1) * _combo_variance(combo, gamma + 1.5) ** (m // 2)


def kappa_limit_cornerX(m: int, combo: LinearCombo, rho: float) -> float:
    """Cumulants of the Gaussian / product-normal mixture at corner (-1/2, -1).

    For m = 2 the Gaussian part contributes as well and the result is the
    Brownian variance of the combination, whatever rho is.
    """
    _check_order(m)
    if not 0.0 <= rho <= 1.0:
        raise RangeError(f"rho must lie in [0, 1], got {rho}")
    var = _combo_variance(combo, 0.5)
    if m == 2:
        return var
    if m % 2:
        return 0.0
    return rho ** (m / 2) * math.factorial(m - 1) * var ** (m // 2)


def _cornerY_weights(rho: float) -> tuple[float, float]:
    """Normalized (p, q) with p^2 + q^2 = 1; p carries the (1+rho) part."""
    norm = math.sqrt((1 + rho) ** 2 + 4 * rho)
    return (1 + rho) / norm, 2 * math.sqrt(rho) / norm


def kappa_limit_cornerY(m: int, combo: LinearCombo, rho: float) -> float:
    """Cumulants of t (a X_1 + b X_2), standardized chi-square X_i."""
    _check_order(m)
    if not 0.0 <= rho <= 1.0:
        raise RangeError(f"rho must lie in [0, 1], got {rho}")
    level = float(combo.coeffs @ combo.times)
    if rho == 0.0:
        return 0.0 if m % 2 else math.factorial(m - 1) * level**m
    p, q = _cornerY_weights(rho)
    return ((q + p) ** m + (q - p) ** m) * level**m * math.factorial(m - 1) / 2


def kappa_limit(law: LimitLaw, m: int, combo: LinearCombo) -> float:
    if law.kind is LawKind.BROWNIAN_MOTION:
        _check_order(m)
        return _combo_variance(combo, 0.5) if m == 2 else 0.0
    if law.kind is LawKind.PRODUCT_FBM:
        return kappa_limit_edge(m, combo, law.gamma)
    if law.kind is LawKind.CORNER_X:
        return kappa_limit_cornerX(m, combo, law.rho)
    return kappa_limit_cornerY(m, combo, law.rho)


def cf_product_normal(u: float) -> float:
    """Characteristic function of W Z for independent standard normals."""
    return 1.0 / math.sqrt(1.0 + u * u)


def _block_rng(seed: int, tag: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(tag, block)))


def _blocks(n_paths: int):
    for start in range(0, n_paths, PATH_BLOCK):
        yield start // PATH_BLOCK, start, min(start + PATH_BLOCK, n_paths)


def _circulant_sqrt_eigs(H: float, n: int, step: float) -> tuple[np.ndarray, float]:
    k = np.arange(n + 1, dtype=float)
    r = 0.5 * step ** (2 * H) * ((k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))
    row = np.concatenate([r, r[-2:0:-1]])
    lam = np.fft.fft(row).real
    clip = float(max(0.0, -lam.min()))
    return np.sqrt(np.clip(lam, 0.0, None) / row.size), clip


def _fgn_circulant(H: float, n: int, step: float, n_paths: int, seed: int, tag: int):
    scale, clip = _circulant_sqrt_eigs(H, n, step)
    size = scale.size
    out = np.empty((n_paths, n))
    for block, lo, hi in _blocks(n_paths):
        rng = _block_rng(seed, tag, block)
        z = rng.standard_normal((hi - lo, size)) + 1j * rng.standard_normal((hi - lo, size))
        out[lo:hi] = np.fft.fft(scale * z, axis=1).real[:, :n]
    return out, clip


def _is_uniform_from_zero(grid: np.ndarray) -> bool:
    if grid[0] != 0 or grid.size < 2:
        return False
    step = grid[1] - grid[0]
    return bool(np.allclose(np.diff(grid), step, rtol=1e-10, atol=1e-14))


def _gaussian_on_grid(H: float, grid: np.ndarray, n_paths: int, seed: int, tag: int):
    """fBm with Hurst index H observed on ``grid``; returns (paths, max clip)."""
    if _is_uniform_from_zero(grid):
        n = grid.size - 1
        inc, clip = _fgn_circulant(H, n, grid[1], n_paths, seed, tag)
        return np.concatenate([np.zeros((n_paths, 1)), np.cumsum(inc, axis=1)], axis=1), clip
    pos = grid > 0
    t = grid[pos]
    cov = 0.5 * (t[:, None] ** (2 * H) + t[None, :] ** (2 * H) - np.abs(t[:, None] - t[None, :]) ** (2 * H))
    chol = np.linalg.cholesky(cov + 1e-14 * np.eye(t.size) * cov.diagonal().max())
    out = np.zeros((n_paths, grid.size))
    for block, lo, hi in _blocks(n_paths):
        rng = _block_rng(seed, tag, block)
        out[lo:hi, pos] = rng.standard_normal((hi - lo, t.size)) @ chol.T
    return out, 0.0


def sample_fbm(H: float, n_steps: int, horizon: float, n_paths: int, seed: int) -> PathEnsemble:
    """Fractional Brownian motion on a uniform grid by circulant embedding.

    The embedding is exact in law when all circulant eigenvalues are
    nonnegative; otherwise negatives are clipped and the largest clipped
    magnitude is recorded in ``meta["max_clip"]``.
    """
    if not 0 < H < 1:
        raise DomainError(f"Hurst index must lie in (0, 1), got {H}")
    if n_steps < 1 or horizon <= 0 or n_paths < 1:
        raise RangeError("n_steps, horizon and n_paths must be positive")
    grid = np.linspace(0.0, horizon, n_steps + 1)
    paths, clip = _gaussian_on_grid(H, grid, n_paths, seed, tag=1)
    meta = {"law": f"fBm(H={H:g})", "seed": seed, "max_clip": clip}
    return PathEnsemble(grid, paths, meta)


def _chi2_standard(rng: np.random.Generator, shape) -> np.ndarray:
    z = rng.standard_normal(shape)
    return (z * z - 1.0) / math.sqrt(2.0)


def _normals(n_paths: int, seed: int, tag: int) -> np.ndarray:
    out = np.empty(n_paths)
    for block, lo, hi in _blocks(n_paths):
        out[lo:hi] = _block_rng(seed, tag, block).standard_normal(hi - lo)
    return out


def sample_limit(law: LimitLaw, grid, n_paths: int, seed: int) -> PathEnsemble:
    """Sample the limit process on ``grid`` (increasing, nonnegative)."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise DomainError("grid must be increasing and nonnegative")
    if n_paths < 1:
        raise RangeError("n_paths must be positive")
    clip = 0.0
    if law.kind is LawKind.BROWNIAN_MOTION:
        paths, clip = _gaussian_on_grid(0.5, grid, n_paths, seed, tag=1)
    elif law.kind is LawKind.PRODUCT_FBM:
        fbm, clip = _gaussian_on_grid(law.hurst(), grid, n_paths, seed, tag=1)
        paths = _normals(n_paths, seed, tag=2)[:, None] * fbm
    elif law.kind is LawKind.CORNER_X:
        b1, _ = _gaussian_on_grid(0.5, grid, n_paths, seed, tag=1)
        b2, _ = _gaussian_on_grid(0.5, grid, n_paths, seed, tag=3)
        w = _normals(n_paths, seed, tag=2)
        paths = math.sqrt(law.rho) * w[:, None] * b1 + math.sqrt(1 - law.rho) * b2
    else:
        x = np.empty((n_paths, 2))
        for block, lo, hi in _blocks(n_paths):
            rng = _block_rng(seed, 4, block)
            if law.rho == 0.0:
                # rho -> 0 limit: (X_1 - X_2)/sqrt(2) has the law of a product of two normals
                x[lo:hi] = rng.standard_normal((hi - lo, 2))
            else:
                x[lo:hi] = _chi2_standard(rng, (hi - lo, 2))
        if law.rho == 0.0:
            level = x[:, 0] * x[:, 1]
        else:
            p, q = _cornerY_weights(law.rho)
            level = ((q + p) * x[:, 0] + (q - p) * x[:, 1]) / math.sqrt(2.0)
        paths = level[:, None] * grid[None, :]
    meta = {"law": str(law), "seed": seed, "n_paths": n_paths, "max_clip": clip}
    return PathEnsemble(grid, paths, meta)


def rate_diag(p: ExponentPair) -> float:
    gap = p.gamma1 + p.gamma2 + 1.5
    return max(gap, 0.0) ** 1.5


def rate_corner(p: ExponentPair) -> float:
    """Total-variation rate scale near corner (-1/2, -1)."""
    g1, g2 = p.gammas
    radicand = 1.0 / (-g1 - 0.5) - 1.0 / (g2 + 1.0)
    if radicand < -1e-12 * abs(1.0 / (-g1 - 0.5)):
        raise DomainError("corner rate radicand is negative; point is outside the triangle")
    L = math.sqrt(max(radicand, 0.0))
    V = (g1 + g2 + 1.5) ** 1.5 / (g2 + 1.0)
    return V * (1.0 + L)


def dw_bound_edge(k3: float, k4: float, k6: float) -> float:
    """Wasserstein bound to the product-normal law from the first cumulants."""
    return math.sqrt(max(0.0, 1.0 + k3 * k3 / 6.0 - k4 / 3.0 + k6 / 120.0))


def m_statistic(k3: float, k4: float) -> float:
    return max(abs(k3), abs(k4))
