"""Parameter types and closed-form moments of the generalized Rosenblatt process.

The admissible region is the open triangle

    -1 < g1 < -1/2,  -1 < g2 < -1/2,  g1 + g2 > -3/2

and the Hurst index is H = g1 + g2 + 2.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError
from .special_functions import log_beta

BOUNDARY_EPS = 1e-9
CORNER_RADIUS = 0.1


@dataclass(frozen=True)
class ExponentPair:
    gamma1: float
    gamma2: float

    def hurst(self) -> float:
        return self.gamma1 + self.gamma2 + 2.0

    def swap(self) -> "ExponentPair":
        return ExponentPair(self.gamma2, self.gamma1)

    @property
    def interior(self) -> bool:
        return in_triangle(self)

    @property
    def gammas(self) -> tuple[float, float]:
        return (self.gamma1, self.gamma2)

    def boundary_distance(self) -> float:
        """Euclidean distance to the boundary of the triangle (negative outside)."""
        g1, g2 = self.gamma1, self.gamma2
        return min(-0.5 - g1, -0.5 - g2, (g1 + g2 + 1.5) / math.sqrt(2.0))


@dataclass(frozen=True)
class LinearCombo:
    """Weighted time points, standing for sum_i c_i Z(t_i)."""

    entries: tuple[tuple[float, float], ...]

    def __init__(self, entries: Iterable[Sequence[float]]):
        pairs = tuple((float(c), float(t)) for c, t in entries)
        if not pairs:
            raise DomainError("a linear combination needs at least one term")
        for _, t in pairs:
            if not (math.isfinite(t) and t >= 0):
                raise DomainError(f"times must be finite and nonnegative, got {t}")
        object.__setattr__(self, "entries", pairs)

    @classmethod
    def unit(cls, t: float = 1.0) -> "LinearCombo":
        return cls([(1.0, t)])

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([c for c, _ in self.entries])

    @property
    def times(self) -> np.ndarray:
        return np.array([t for _, t in self.entries])

    def __len__(self) -> int:
        return len(self.entries)

    def scaled(self, coeff: float = 1.0, time: float = 1.0) -> "LinearCombo":
        return LinearCombo([(c * coeff, t * time) for c, t in self.entries])

    def is_unit_like(self) -> bool:
        """True when all time points coincide, so the combo is c * Z(t)."""
        return len({t for _, t in self.entries}) == 1

    @classmethod
    def parse(cls, text: str) -> "LinearCombo":
        """Parse ``"c1:t1,c2:t2"``; a bare number ``t`` means ``1:t``."""
        pairs = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                c, t = part.split(":")
                pairs.append((float(c), float(t)))
            else:
                pairs.append((1.0, float(part)))
        return cls(pairs)

    def __str__(self) -> str:
        return ",".join(f"{c:g}:{t:g}" for c, t in self.entries)


class BoundaryKind(enum.Enum):
    DIAGONAL_D = "DiagonalD"
    EDGE_E1 = "EdgeE1"
    EDGE_E2 = "EdgeE2"
    CORNER_HALF_ONE = "Corner_half_one"
    CORNER_HALF_HALF = "Corner_half_half"


@dataclass(frozen=True)
class BoundaryTarget:
    kind: BoundaryKind
    gamma: float | None = None
    rho: float | None = None

    def __post_init__(self):
        if self.kind in (BoundaryKind.EDGE_E1, BoundaryKind.EDGE_E2):
            if self.gamma is None or not -1.0 < self.gamma < -0.5:
                raise DomainError(f"edge target needs gamma in (-1, -1/2), got {self.gamma}")
        if self.kind in (BoundaryKind.CORNER_HALF_ONE, BoundaryKind.CORNER_HALF_HALF):
            if self.rho is None or not 0.0 <= self.rho <= 1.0:
                raise DomainError(f"corner target needs rho in [0, 1], got {self.rho}")


@dataclass(frozen=True)
class BoundaryInfo:
    target: BoundaryTarget
    distance: float
    ratios: dict = field(default_factory=dict)
    mirrored: bool = False

    def __iter__(self):
        # allows ``target, distance = classify_boundary(p)``
        return iter((self.target, self.distance))


def in_triangle(p: ExponentPair) -> bool:
    g1, g2 = p.gamma1, p.gamma2
    return -1.0 < g1 < -0.5 and -1.0 < g2 < -0.5 and g1 + g2 > -1.5


def require_interior(p: ExponentPair, eps: float = BOUNDARY_EPS) -> None:
    if not in_triangle(p):
        raise DomainError(f"{p} is outside the admissible triangle")
    if p.boundary_distance() < eps:
        raise DomainError(f"{p} is within {eps:g} of the triangle boundary")


def _log_bracket(g1: float, g2: float) -> float:
    """log of B(g1+1,-S-1)B(g2+1,-S-1) + B(g1+1,-2g1-1)B(g2+1,-2g2-1)."""
    s = g1 + g2
    cross = log_beta(g1 + 1, -s - 1) + log_beta(g2 + 1, -s - 1)
    diag = log_beta(g1 + 1, -2 * g1 - 1) + log_beta(g2 + 1, -2 * g2 - 1)
    return float(np.logaddexp(cross, diag))


def normalization_A(p: ExponentPair) -> float:
    """Positive constant making Var Z(1) = 1."""
    require_interior(p)
    s = p.gamma1 + p.gamma2
    log_a2 = math.log((s + 2) * (2 * s + 3)) - _log_bracket(p.gamma1, p.gamma2)
    return math.exp(0.5 * log_a2)


def mu2_raw(p: ExponentPair, A: float) -> float:
    """E Z(1)^2 when the kernel carries the constant ``A``."""
    require_interior(p)
    s = p.gamma1 + p.gamma2
    return A * A * math.exp(_log_bracket(p.gamma1, p.gamma2)) / ((s + 2) * (2 * s + 3))


def mu3(p: ExponentPair) -> float:
    """Third cumulant of the standardized Z(1)."""
    require_interior(p)
    g = {1: p.gamma1, 2: p.gamma2}
    s = p.gamma1 + p.gamma2
    terms = []
    for w in itertools.product((1, 2), repeat=3):
        c = [3 - x for x in w]
        a1, a2, a3 = (g[x] for x in w)
        b1, b2, b3 = (g[x] for x in c)
        terms.append(
            log_beta(a1 + 1, -a1 - b3 - 1)
            + log_beta(b1 + 1, -b1 - a2 - 1)
            + log_beta(b2 + 1, -b2 - a3 - 1)
            + log_beta(b1 + a2 + 2, b2 + a3 + 2)
        )
    log_a = math.log(normalization_A(p))
    return 2.0 * math.exp(3 * log_a + logsumexp(terms)) / ((s + 2) * (3 * s + 5))


def cross_covariance(a: ExponentPair, g: ExponentPair) -> float:
    """E[Z_a(1) Z_g(1)] for standardized processes driven by the same noise."""
    require_interior(a)
    require_interior(g)
    a1, a2 = a.gammas
    c1, c2 = g.gammas
    args = [
        ((a1 + 1, -a1 - c1 - 1), (a2 + 1, -a2 - c2 - 1)),
        ((c1 + 1, -a1 - c1 - 1), (c2 + 1, -a2 - c2 - 1)),
        ((a2 + 1, -a2 - c1 - 1), (a1 + 1, -a1 - c2 - 1)),
        ((c1 + 1, -a2 - c1 - 1), (c2 + 1, -a1 - c2 - 1)),
    ]
    logs = []
    for (x1, y1), (x2, y2) in args:
        if min(x1, y1, x2, y2) <= 0:
            raise DomainError("cross-covariance beta argument is not positive")
        logs.append(log_beta(x1, y1) + log_beta(x2, y2))
    total = sum(a.gammas) + sum(g.gammas)
    log_norm = math.log(normalization_A(a)) + math.log(normalization_A(g))
    return math.exp(log_norm + logsumexp(logs)) / ((total + 3) * (total + 4))


def classify_boundary(p: ExponentPair) -> BoundaryInfo:
    """Nearest boundary feature of the triangle.

    A point within ``CORNER_RADIUS`` of a vertex is attributed to that
    vertex, otherwise to the nearest edge.  Corners also report the two
    direction ratios that index their limit laws.
    """
    if not in_triangle(p):
        raise DomainError(f"{p} is outside the admissible triangle")
    g1, g2 = p.gammas
    s = g1 + g2
    ratios = {
        "corner_half_one": (s + 1.5) / (g2 + 1),
        "corner_half_half": (g1 + 0.5) / (g2 + 0.5),
    }
    corners = [
        ((-0.5, -1.0), BoundaryKind.CORNER_HALF_ONE, False),
        ((-1.0, -0.5), BoundaryKind.CORNER_HALF_ONE, True),
        ((-0.5, -0.5), BoundaryKind.CORNER_HALF_HALF, False),
    ]
    best = None
    for (x, y), kind, mirrored in corners:
        dist = math.hypot(g1 - x, g2 - y)
        if dist <= CORNER_RADIUS and (best is None or dist < best[0]):
            best = (dist, kind, mirrored)
    if best is not None:
        dist, kind, mirrored = best
        if kind is BoundaryKind.CORNER_HALF_ONE:
            rho = (s + 1.5) / ((g1 if mirrored else g2) + 1)
        else:
            lo, hi = sorted((-0.5 - g1, -0.5 - g2))
            rho = lo / hi
        rho = min(max(rho, 0.0), 1.0)
        return BoundaryInfo(BoundaryTarget(kind, rho=rho), dist, ratios, mirrored)

    edges = [
        (-0.5 - g1, BoundaryTarget(BoundaryKind.EDGE_E1, gamma=g2)),
        (-0.5 - g2, BoundaryTarget(BoundaryKind.EDGE_E2, gamma=g1)),
        ((s + 1.5) / math.sqrt(2.0), BoundaryTarget(BoundaryKind.DIAGONAL_D)),
    ]
    dist, target = min(edges, key=lambda e: e[0])
    return BoundaryInfo(target, dist, ratios)
