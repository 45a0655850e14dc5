"""Lattice simulation of the generalized Rosenblatt process.

Two long-memory moving averages driven by the same Gaussian noise,

    Y_g(n) = sum_{i >= 2} i^g eps_{n-i},

are multiplied, centred and summed:

    Z_N(t) = A * N^-H * sum_{n <= N t} (Y_g1(n) Y_g2(n) - E[Y_g1 Y_g2]).

Noise with lag up to ``trunc + n`` is drawn explicitly and convolved by
FFT.  Older noise enters ``Y(n)`` through ``sum_k (n + L_k)^g eps_k`` with
``L_k > trunc``; expanding ``(n + L)^g`` in powers of ``n / L`` turns it into
a short polynomial in ``n`` whose coefficients are jointly Gaussian with
Hurwitz zeta covariances, so this far part is sampled exactly up to a
series truncation below 1e-12 instead of being dropped.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import ExponentPair, normalization_A, require_interior
from .errors import DomainError, NormalizationWarning, RangeError
from .parallel import parallel_map
from .paths import PathEnsemble
from .special_functions import power_tail_sum

PATH_BLOCK = 256
_SERIES_TOL = 1e-12


@dataclass(frozen=True)
class LatticeConfig:
    n_grid: int = 256
    trunc: int | None = None
    n_paths: int = 10_000
    seed: int = 0
    jobs: int = 1
    record_per_unit: int | None = None  # stored grid points per unit time

    def __post_init__(self):
        if self.n_grid < 256 or self.n_grid & (self.n_grid - 1):
            raise RangeError(f"n_grid must be a power of two >= 256, got {self.n_grid}")
        if self.trunc is not None and self.trunc < 16 * self.n_grid:
            raise RangeError(f"trunc must be at least 16 * n_grid = {16 * self.n_grid}")
        if self.n_paths < 1:
            raise RangeError("n_paths must be positive")
        rec = self.record_per_unit
        if rec is not None and (rec < 1 or self.n_grid % rec):
            raise RangeError("record_per_unit must divide n_grid")

    @property
    def depth(self) -> int:
        return self.trunc if self.trunc is not None else 16 * self.n_grid


def _check_gamma(g: float) -> None:
    if not -1.0 < g < -0.5:
        raise DomainError(f"moving-average exponent must lie in (-1, -1/2), got {g}")


def linear_coeffs(gamma: float, length: int) -> np.ndarray:
    """Coefficients i^gamma for i = 2 .. length + 1."""
    _check_gamma(gamma)
    if length < 2:
        raise RangeError("length must be at least 2")
    return np.arange(2, length + 2, dtype=float) ** gamma


def discrete_kernel(s: float, x: float, N: int, gamma: float) -> float:
    """Lattice version of (s - x)_+^gamma: ((|Ns| - |Nx| + 1)/N)^gamma if |Ns| > |Nx|."""
    ns, nx = math.floor(N * s), math.floor(N * x)
    if ns <= nx:
        return 0.0
    return ((ns - nx + 1) / N) ** gamma


@dataclass
class _FarField:
    """Exact law of the contribution of noise older than the explicit window."""

    order: int
    basis: np.ndarray  # (2, order+1, n_steps): binom(g,p) (n/(M+1))^p
    root: np.ndarray  # (2*(order+1), 2*(order+1)) covariance square root

    @classmethod
    def build(cls, gammas: tuple[float, float], depth: int, n_steps: int) -> "_FarField":
        ratio = n_steps / (depth + 1)
        order = max(2, int(math.ceil(math.log(_SERIES_TOL) / math.log(ratio))))
        p = np.arange(order + 1)
        n = np.arange(1, n_steps + 1) / (depth + 1)
        basis = np.stack([special.binom(g, p)[:, None] * n[None, :] ** p[:, None] for g in gammas])
        size = 2 * (order + 1)
        cov = np.empty((size, size))
        for a in range(2):
            for b in range(2):
                s = (p[:, None] + p[None, :]) - gammas[a] - gammas[b]
                # rescaled so all entries share the order (M+1)^(g_a + g_b + 1)
                block = special.zeta(s, depth + 1) * float(depth + 1) ** (p[:, None] + p[None, :])
                cov[a * (order + 1) : (a + 1) * (order + 1), b * (order + 1) : (b + 1) * (order + 1)] = block
        vals, vecs = np.linalg.eigh(0.5 * (cov + cov.T))
        root = vecs * np.sqrt(np.clip(vals, 0.0, None))
        return cls(order, basis, root)

    def sample(self, rng: np.random.Generator, n_paths: int) -> np.ndarray:
        xi = rng.standard_normal((n_paths, self.root.shape[1])) @ self.root.T
        k = self.order + 1
        return np.stack([xi[:, :k] @ self.basis[0], xi[:, k:] @ self.basis[1]])


def _depth(trunc: int, n_steps: int) -> int:
    """Explicit noise depth; at least 16 windows so the far-field series converges fast."""
    return max(trunc, 16 * n_steps)


def _fft_size(n: int) -> int:
    return 1 << (n - 1).bit_length()


@dataclass(frozen=True)
class _BlockJob:
    gammas: tuple[float, float]
    n_steps: int
    depth: int
    seed: int
    block: int
    n_paths: int
    stride: int
    scale: float
    mean: float


def _linear_pair_block(job: _BlockJob, rng: np.random.Generator):
    g1, g2 = job.gammas
    n, depth = job.n_steps, job.depth
    n_noise = n + depth - 1
    lags = np.arange(2, n + depth + 1, dtype=float)
    size = _fft_size(n_noise + lags.size - 1)
    eps = rng.standard_normal((job.n_paths, n_noise))
    far = _FarField.build(job.gammas, depth, n).sample(rng, job.n_paths)
    spec = np.fft.rfft(eps, size, axis=1)
    out = []
    for a, g in enumerate((g1, g2)):
        conv = np.fft.irfft(spec * np.fft.rfft(lags**g, size)[None, :], size, axis=1)
        out.append(conv[:, depth - 1 : depth - 1 + n] + far[a])
    return out


def _simulate_block(job: _BlockJob) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(job.seed, spawn_key=(5, job.block)))
    y1, y2 = _linear_pair_block(job, rng)
    sums = np.cumsum(y1 * y2 - job.mean, axis=1)[:, job.stride - 1 :: job.stride]
    return np.concatenate([np.zeros((job.n_paths, 1)), job.scale * sums], axis=1)


def gen_linear_pair(gamma1: float, gamma2: float, length: int, trunc: int, seed: int):
    """Two stationary moving averages of ``length`` steps driven by one noise sequence."""
    _check_gamma(gamma1)
    _check_gamma(gamma2)
    if length < 1 or trunc < 1:
        raise RangeError("length and trunc must be positive")
    job = _BlockJob((gamma1, gamma2), length, _depth(trunc, length), seed, 0, 1, 1, 1.0, 0.0)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(6,)))
    y1, y2 = _linear_pair_block(job, rng)
    return y1[0], y2[0]


def simulate_paths(p: ExponentPair, horizon: float, cfg: LatticeConfig) -> PathEnsemble:
    """Sample paths of the normalized lattice sums on the grid k / n_grid.

    The paths are scaled by A(g1, g2) N^-H and then rescaled so that the
    ensemble variance at t = 1 (or at the horizon, scaled by horizon^2H,
    when the horizon is shorter) is exactly one.
    """
    require_interior(p)
    steps = horizon * cfg.n_grid
    if horizon <= 0 or abs(steps - round(steps)) > 1e-9:
        raise RangeError("horizon * n_grid must be a positive integer")
    n_steps = int(round(steps))
    record = cfg.record_per_unit or cfg.n_grid
    stride = cfg.n_grid // record
    if n_steps % stride:
        raise RangeError("horizon must be a multiple of the recording step")
    H = p.hurst()
    scale = normalization_A(p) * cfg.n_grid ** (-H)
    mean = power_tail_sum(p.gamma1 + p.gamma2, 2)
    jobs = [
        _BlockJob(p.gammas, n_steps, _depth(cfg.depth, n_steps), cfg.seed, b, min(PATH_BLOCK, cfg.n_paths - lo), stride, scale, mean)
        for b, lo in enumerate(range(0, cfg.n_paths, PATH_BLOCK))
    ]
    paths = np.concatenate(parallel_map(_simulate_block, jobs, cfg.jobs), axis=0)
    grid = np.arange(n_steps // stride + 1) * (stride / cfg.n_grid)

    ref_t = 1.0 if horizon >= 1 else horizon
    ref = int(round(ref_t * record))
    raw_var = float(np.var(paths[:, ref], ddof=1)) if cfg.n_paths > 1 else float("nan")
    target = ref_t ** (2 * H)
    rescale = math.sqrt(target / raw_var) if raw_var > 0 else 1.0
    if cfg.n_paths > 1 and abs(raw_var / target - 1) > 0.05:
        warnings.warn(
            f"variance at t={ref_t:g} before rescaling is {raw_var / target:.3f} of its target",
            NormalizationWarning,
            stacklevel=2,
        )
    meta = {
        "gamma1": p.gamma1,
        "gamma2": p.gamma2,
        "hurst": H,
        "n_grid": cfg.n_grid,
        "trunc": _depth(cfg.depth, n_steps),
        "n_paths": cfg.n_paths,
        "seed": cfg.seed,
        "normalizer": "A * N^-H, then empirical rescale at t=%g" % ref_t,
        "raw_variance": raw_var,
        "rescale": rescale,
        "far_noise_variance_g1": power_tail_sum(2 * p.gamma1, _depth(cfg.depth, n_steps) + 2),
        "far_noise_variance_g2": power_tail_sum(2 * p.gamma2, _depth(cfg.depth, n_steps) + 2),
    }
    return PathEnsemble(grid, paths * rescale, meta)


def _cross_autocov(a: float, b: float, max_lag: int, cutoff: int = 200_000) -> np.ndarray:
    """r(k) = sum_{i >= 2} i^a (i + k)^b for k = 0 .. max_lag - 1."""
    i = np.arange(2, cutoff, dtype=float)
    k = np.arange(max_lag, dtype=float)
    ia = i**a
    head = np.array([ia @ (i + kk) ** b for kk in k])
    K = float(cutoff)
    # integral of x^a (x+k)^b over [K, inf) by a binomial series in k/K
    tail = np.zeros(max_lag)
    for q in range(8):
        tail += special.binom(b, q) * (k / K) ** q * K ** (a + b + 1) / (q - a - b - 1)
    f = K**a * (K + k) ** b
    fprime = f * (a / K + b / (K + k))
    return head + tail + 0.5 * f - fprime / 12.0


def lattice_cumulants(p: ExponentPair, n_steps: int, orders=(2, 3, 4, 6)) -> dict:
    """Exact cumulants of sum_{n <= n_steps} (Y_g1(n) Y_g2(n) - mean).

    The sum is a Gaussian quadratic form, so its cumulants follow from the
    eigenvalues of the joint covariance of (Y_g1, Y_g2) over the window.
    Returns raw cumulants and the standardized ones (divided by k2^(m/2)).
    """
    require_interior(p)
    g1, g2 = p.gammas
    r = {
        (0, 0): _cross_autocov(g1, g1, n_steps),
        (1, 1): _cross_autocov(g2, g2, n_steps),
        (0, 1): _cross_autocov(g1, g2, n_steps),
        (1, 0): _cross_autocov(g2, g1, n_steps),
    }
    idx = np.arange(n_steps)
    lag = idx[None, :] - idx[:, None]
    K = np.empty((2 * n_steps, 2 * n_steps))
    for a in range(2):
        for b in range(2):
            # Cov(Y_a(n), Y_b(n')) is r_ab(n' - n) for n' >= n and r_ba(n - n') otherwise
            block = np.where(lag >= 0, r[(a, b)][np.abs(lag)], r[(b, a)][np.abs(lag)])
            K[a * n_steps : (a + 1) * n_steps, b * n_steps : (b + 1) * n_steps] = block
    vals, vecs = np.linalg.eigh(0.5 * (K + K.T))
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    perm = np.concatenate([np.arange(n_steps, 2 * n_steps), np.arange(n_steps)])
    lam = np.linalg.eigvalsh(0.5 * root[:, perm] @ root)
    raw = {m: 2 ** (m - 1) * math.factorial(m - 1) * float(np.sum(lam**m)) for m in orders}
    var = raw[2] if 2 in raw else 2 * float(np.sum(lam**2))
    standardized = {m: v / var ** (m / 2) for m, v in raw.items()}
    return {"raw": raw, "standardized": standardized}
