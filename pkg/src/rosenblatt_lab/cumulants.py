"""Joint cumulants of the generalized Rosenblatt process.

For a linear combination ``X = sum_i c_i Z(t_i)``,

    kappa_m(X) = (m-1)!/2 * A^m * C_m

where ``C_m`` sums, over sigma-words in {1,2}^m, circular integrals whose
links are the brackets

    g_ab(s, u) = (u-s)_+^e B(gamma_a+1, -e) + (s-u)_+^e B(gamma_b+1, -e),
    e = gamma_a + gamma_b + 1,

with ``a = sigma_j`` and ``b`` the complement of ``sigma_{j-1}``.

Three evaluation routes are available:

``"faces"``
    randomized QMC on the face reduction (exact for m = 2, a one
    dimensional integral for m = 3);
``"spectral"``
    Galerkin eigenvalues of the transfer operator, deterministic, with an
    extrapolation error figure;
``"auto"``
    faces for m <= 3 and spectral above.
"""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _faces, _spectral
from .core import ExponentPair, LinearCombo, normalization_A, require_interior
from .errors import BudgetError, ConvergenceWarning, DomainError, RangeError, SizeError
from .special_functions import beta_fn

MIN_BUDGET = 10_000
REL_SE_WARNING = 0.05


def default_budget(m: int) -> int:
    return 2_000_000 if m <= 4 else 500_000


@dataclass(frozen=True)
class SigmaWord:
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 2 or any(b not in (1, 2) for b in self.bits):
            raise RangeError(f"a sigma word needs length >= 2 over {{1, 2}}, got {self.bits}")

    @property
    def m(self) -> int:
        return len(self.bits)

    def complement(self) -> "SigmaWord":
        return SigmaWord(tuple(3 - b for b in self.bits))

    def alternations(self) -> int:
        return sum(self.bits[j] != self.bits[j - 1] for j in range(self.m))

    def r(self) -> int:
        """Positions with sigma_j = 1 and complemented predecessor equal to 1."""
        return sum(self.bits[j] == 1 and 3 - self.bits[j - 1] == 1 for j in range(self.m))

    @classmethod
    def all_words(cls, m: int):
        for bits in itertools.product((1, 2), repeat=m):
            yield cls(bits)


@dataclass(frozen=True)
class CircularExponents:
    alphas: tuple[float, ...]
    times: tuple[float, ...]

    def __init__(self, alphas: Sequence[float], times: Sequence[float] | None = None):
        alphas = tuple(float(a) for a in alphas)
        times = tuple(float(t) for t in times) if times is not None else (1.0,) * len(alphas)
        if len(times) != len(alphas):
            raise SizeError("alphas and times must have the same length")
        if not all(math.isfinite(x) for x in alphas + times):
            raise DomainError("exponents and times must be finite")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "times", times)

    @property
    def m(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    std_error: float
    n_samples: int
    method: str = ""
    converged: bool = True


class Finiteness(enum.Enum):
    VERIFIED_FINITE = "VerifiedFinite"
    UNVERIFIED = "Unverified"


def domain_check(e: CircularExponents) -> bool:
    return all(a > -1 for a in e.alphas) and sum(e.alphas) + e.m > 1


@lru_cache(maxsize=None)
def _independent_subsets(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Sizes and span-membership masks of the independent subsets of the
    circular difference vectors e_j - e_{j-1}."""
    vecs = np.zeros((m, m))
    for j in range(m):
        vecs[j, j] += 1.0
        vecs[j, (j - 1) % m] -= 1.0
    sizes, masks = [], []
    for size in range(1, m):
        for subset in itertools.combinations(range(m), size):
            base = vecs[list(subset)]
            if np.linalg.matrix_rank(base) < size:
                continue
            mask = np.zeros(m, dtype=bool)
            for j in range(m):
                if j in subset or np.linalg.matrix_rank(np.vstack([base, vecs[j]])) == size:
                    mask[j] = True
            sizes.append(size)
            masks.append(mask)
    return np.array(sizes), np.array(masks)


def power_counting_check(e: CircularExponents) -> Finiteness:
    """Fox-Taqqu power counting for the circular integrand.

    Every independent subset W must satisfy |W| + sum of the exponents of
    the difference vectors in span(W) > 0.  This is sufficient for
    finiteness, not necessary.
    """
    if e.m > 12:
        raise SizeError("power counting enumeration is limited to m <= 12")
    if e.m < 2:
        raise SizeError("circular integrals need m >= 2")
    sizes, masks = _independent_subsets(e.m)
    d = sizes + masks.astype(float) @ np.array(e.alphas)
    return Finiteness.VERIFIED_FINITE if np.all(d > 0) else Finiteness.UNVERIFIED


def _check_budget(budget: int) -> None:
    if budget < MIN_BUDGET:
        raise BudgetError(f"budget must be at least {MIN_BUDGET}, got {budget}")


def _flag(result: QuadratureResult, target_se: float | None) -> QuadratureResult:
    rel = result.std_error / abs(result.value) if result.value else math.inf
    ok = rel <= REL_SE_WARNING and (target_se is None or result.std_error <= target_se)
    if not ok:
        warnings.warn(
            f"{result.method} estimate has std error {result.std_error:.3g} "
            f"for value {result.value:.6g}",
            ConvergenceWarning,
            stacklevel=3,
        )
    return QuadratureResult(result.value, result.std_error, result.n_samples, result.method, ok)


def _scalar_chain(e: CircularExponents) -> _faces.Chain:
    alphas = np.array(e.alphas).reshape(-1, 1, 1)
    ones = np.ones_like(alphas)
    terms = tuple(((1.0, t),) for t in e.times)
    return _faces.Chain(ones, ones, alphas, terms, float(sum(e.alphas)))


def f_circular(
    e: CircularExponents,
    budget: int = 2_000_000,
    seed: int = 0,
    jobs: int = 1,
    target_se: float | None = None,
) -> QuadratureResult:
    """Integral of prod_j |s_j - s_{j-1}|^alpha_j over prod_j [0, t_j] (cyclic)."""
    if not domain_check(e):
        raise DomainError(f"circular exponents {e.alphas} are outside the finiteness domain")
    _check_budget(budget)
    if any(t <= 0 for t in e.times):
        return QuadratureResult(0.0, 0.0, 1, "faces")
    value, se, n = _faces.integrate(_scalar_chain(e), budget, seed, jobs)
    return _flag(QuadratureResult(value, se, n, "faces"), target_se)


def bracket_chain(p: ExponentPair, combo: LinearCombo, m: int) -> _faces.Chain:
    """Transfer matrices of the sigma-sum, indexed (sigma_j, sigma_{j-1})."""
    g = p.gammas
    pos = np.empty((2, 2))
    neg = np.empty((2, 2))
    expo = np.empty((2, 2))
    for a in range(2):
        for c in range(2):
            b = 1 - c
            e = g[a] + g[b] + 1
            expo[a, c] = e
            pos[a, c] = beta_fn(g[b] + 1, -e)
            neg[a, c] = beta_fn(g[a] + 1, -e)
    stack = lambda x: np.repeat(x[None], m, axis=0)
    terms = tuple(sorted(combo.entries))
    return _faces.Chain(stack(pos), stack(neg), stack(expo), (terms,) * m, m * (p.hurst() - 1))


def C_m(
    p: ExponentPair,
    combo: LinearCombo,
    m: int,
    budget: int | None = None,
    seed: int = 0,
    method: str = "auto",
    jobs: int = 1,
    target_se: float | None = None,
) -> QuadratureResult:
    """Sum over sigma-words of the bracketed circular integrals."""
    require_interior(p)
    if m < 2:
        raise RangeError(f"cumulant order must be >= 2, got {m}")
    if m > 8:
        raise RangeError("cumulant orders above 8 are not supported")
    budget = default_budget(m) if budget is None else int(budget)
    _check_budget(budget)
    if method == "auto":
        method = "faces" if m <= 3 else "spectral"
    if method == "faces":
        if m >= 4 and len({t for _, t in combo.entries}) > 4:
            raise SizeError("face quadrature handles at most 4 time points for m >= 4")
        value, se, n = _faces.integrate(bracket_chain(p, combo, m), budget, seed, jobs)
        res = QuadratureResult(value, se, n, "faces")
    elif method == "spectral":
        n_cells = _spectral.default_cells(budget)
        value, err, _ = _spectral.trace_estimate(p.gammas, tuple(combo.entries), m, n_cells)
        res = QuadratureResult(value, err, n_cells, "spectral")
    else:
        raise ValueError(f"unknown method {method!r}")
    return _flag(res, target_se)


def kappa_m(
    p: ExponentPair,
    combo: LinearCombo,
    m: int,
    budget: int | None = None,
    seed: int = 0,
    method: str = "auto",
    jobs: int = 1,
    target_se: float | None = None,
) -> QuadratureResult:
    """m-th cumulant of sum_i c_i Z(t_i) for the standardized process."""
    factor = 0.5 * math.factorial(m - 1) * normalization_A(p) ** m
    scaled_target = None if target_se is None else target_se / factor
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        c = C_m(p, combo, m, budget, seed, method, jobs, scaled_target)
    res = QuadratureResult(factor * c.value, factor * c.std_error, c.n_samples, c.method, c.converged)
    if not res.converged and caught:
        warnings.warn(str(caught[0].message), ConvergenceWarning, stacklevel=2)
    return res


def sigma_word_count(m: int, r: int) -> int:
    """Number of words in {1,2}^m with exactly r positions where sigma_j = 1
    and the complement of sigma_{j-1} is 1 (cyclically)."""
    if m < 2 or not 0 <= r <= m // 2:
        raise RangeError(f"need m >= 2 and 0 <= r <= m/2, got m={m}, r={r}")
    return 2 * math.comb(m, 2 * r)


def f_ab_asymptotic_check(
    a: float, b: float, t: Sequence[float], budget: int = 2_000_000, seed: int = 0, jobs: int = 1
) -> tuple[float, float]:
    """Alternating-exponent circular integral against its b -> -1 asymptote.

    Exponent ``a`` sits on the odd links (1-based) and ``b`` on the even
    ones, so the strong singularities pair (t_2, t_1), (t_4, t_3), ...
    """
    m = len(t)
    if m < 4 or m % 2:
        raise SizeError("the alternating check needs an even number m >= 4 of times")
    if not (-1 < a < 0 and -1 < b < 0):
        raise DomainError("a and b must lie in (-1, 0)")
    alphas = [a if j % 2 == 0 else b for j in range(m)]
    e = CircularExponents(alphas, t)
    lhs = f_circular(e, budget, seed, jobs).value
    rhs = (b + 1) ** (-m / 2) * math.prod(
        t[i] + t[i - 1] - abs(t[i] - t[i - 1]) for i in range(1, m, 2)
    )
    return lhs, rhs
