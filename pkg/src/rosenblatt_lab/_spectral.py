"""Galerkin evaluation of the cumulant traces.

Summed over sigma-words, the m-th cumulant integral is ``trace((G D W)^m)``
where ``G`` is the Gram operator of the kernels ``(s - x)_+^gamma_a``, ``D``
swaps the two kernel components and ``W`` multiplies by the step function
``w(s) = sum_i c_i 1{s < t_i}``.  ``G D W`` is similar to the symmetric
``G^(1/2) D W G^(1/2)``, so its spectrum is real and all cumulant orders
come from one eigenvalue computation.  ``G`` is projected on piecewise
constants over cells aligned with the time points; the cell integrals are
exact.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .special_functions import beta_fn


def cell_edges(times: tuple[float, ...], n_cells: int) -> np.ndarray:
    breaks = sorted({0.0, *[t for t in times if t > 0]})
    total = breaks[-1]
    edges = [0.0]
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        k = max(1, int(round(n_cells * (hi - lo) / total)))
        edges.extend(np.linspace(lo, hi, k + 1)[1:])
    return np.array(edges)


def _ramp2(z: np.ndarray, e: float) -> np.ndarray:
    return np.where(z > 0, np.abs(z) ** (e + 2), 0.0) / ((e + 1) * (e + 2))


def _forward_cells(edges: np.ndarray, e: float) -> np.ndarray:
    """Entry (i, j): integral of (u - s)_+^e over s in cell i, u in cell j."""
    x0, x1 = edges[:-1, None], edges[1:, None]
    y0, y1 = edges[None, :-1], edges[None, 1:]
    return _ramp2(y1 - x0, e) - _ramp2(y1 - x1, e) - _ramp2(y0 - x0, e) + _ramp2(y0 - x1, e)


def gram_matrix(gammas: tuple[float, float], edges: np.ndarray) -> np.ndarray:
    h = np.diff(edges)
    scale = 1.0 / np.sqrt(h[:, None] * h[None, :])
    n = len(h)
    G = np.empty((2 * n, 2 * n))
    for a in range(2):
        for b in range(2):
            e = gammas[a] + gammas[b] + 1
            fwd = _forward_cells(edges, e)
            block = beta_fn(gammas[a] + 1, -e) * fwd + beta_fn(gammas[b] + 1, -e) * fwd.T
            G[a * n : (a + 1) * n, b * n : (b + 1) * n] = block * scale
    return G


@lru_cache(maxsize=64)
def spectrum(gammas: tuple[float, float], combo: tuple, n_cells: int) -> np.ndarray:
    """Eigenvalues of the symmetrized transfer operator on ``n_cells`` cells."""
    times = tuple(t for _, t in combo)
    edges = cell_edges(times, n_cells)
    mids = 0.5 * (edges[:-1] + edges[1:])
    w = sum(c * (mids < t) for c, t in combo)
    G = gram_matrix(gammas, edges)
    vals, vecs = np.linalg.eigh(G)
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    n = len(mids)
    perm = np.concatenate([np.arange(n, 2 * n), np.arange(n)])
    wfull = np.concatenate([w, w])
    # (root D W)[:, k] = root[:, perm[k]] * w[k]
    left = root[:, perm] * wfull[None, :]
    R = left @ root
    return np.linalg.eigvalsh(0.5 * (R + R.T))


def power_trace(lam: np.ndarray, m: int) -> float:
    top = np.max(np.abs(lam))
    if top == 0:
        return 0.0
    return float(top**m * np.sum((lam / top) ** m))


def default_cells(budget: int) -> int:
    n = int(min(1200, max(128, 0.6 * math.sqrt(budget))))
    return n - n % 4


def trace_estimate(gammas, combo, m: int, n_cells: int) -> tuple[float, float, list[float]]:
    """Richardson-type estimate from n/4, n/2 and n cells.

    The error figure is the size of the extrapolation step, or the last
    increment when the sequence is not geometric.
    """
    levels = [n_cells // 4, n_cells // 2, n_cells]
    vals = [power_trace(spectrum(tuple(gammas), combo, n), m) for n in levels]
    d1, d2 = vals[1] - vals[0], vals[2] - vals[1]
    if d1 != 0 and 0 < d2 / d1 < 0.95:
        q = d2 / d1
        corr = d2 * q / (1 - q)
        return vals[2] + corr, abs(corr), vals
    return vals[2], abs(d2), vals
