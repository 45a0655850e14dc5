"""Boundary sweeps and the no-L2 cross-covariance study.

A sweep walks towards one boundary feature of the triangle along a fixed
direction and tabulates, for each offset, the analytic cumulants of Z(1),
the cumulants of the matching limit law and the predicted rate.  Paths
can be simulated as well.  The last rows hold log-log slopes of every
quantity that should vanish at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import BoundaryKind, BoundaryTarget, ExponentPair, LinearCombo, cross_covariance
from .cumulants import kappa_m
from .empirics import empirical_cf, k_statistics, loglog_slope, wasserstein1
from .errors import DomainError, RangeError
from .limit_laws import (
    LawKind,
    LimitLaw,
    dw_bound_edge,
    kappa_limit,
    rate_corner,
    rate_diag,
    sample_limit,
)
from .simulator import LatticeConfig, simulate_paths

STATS = ("k3", "k4", "k6", "cf", "w1")


def diag_point(offset: float) -> ExponentPair:
    """Midline point with gamma1 + gamma2 + 3/2 = offset."""
    g = (offset - 1.5) / 2
    return ExponentPair(g, g)


def edge_point(offset: float, gamma: float) -> ExponentPair:
    return ExponentPair(-0.5 - offset, gamma)


def corner_half_one_point(offset: float, rho: float) -> ExponentPair:
    """Approach (-1/2, -1) so that (g1 + g2 + 3/2) / (g2 + 1) -> rho."""
    q = min(max(rho, offset), 1.0 - offset)
    return ExponentPair(-0.5 - (1.0 - q) * offset, -1.0 + offset)


def corner_half_half_point(offset: float, rho: float) -> ExponentPair:
    """Approach (-1/2, -1/2) with offset ratio rho (floored at the offset)."""
    return ExponentPair(-0.5 - max(rho, offset) * offset, -0.5 - offset)


@dataclass
class SweepSpec:
    target: BoundaryTarget
    offsets: list[float]
    stats: list[str] = field(default_factory=lambda: ["k3", "k4"])
    budget: int | None = None
    seed: int = 0
    jobs: int = 1
    lattice: LatticeConfig | None = None

    def __post_init__(self):
        self.offsets = [float(x) for x in self.offsets]
        if not self.offsets or any(x <= 0 for x in self.offsets):
            raise DomainError("offsets must be positive")
        if any(b >= a for a, b in zip(self.offsets, self.offsets[1:])):
            raise DomainError("offsets must be strictly decreasing")
        unknown = set(self.stats) - set(STATS)
        if unknown:
            raise RangeError(f"unknown sweep statistics {sorted(unknown)}")
        for off in self.offsets:
            if not self.point(off).interior:
                raise DomainError(f"offset {off} gives a point outside the triangle")

    def point(self, offset: float) -> ExponentPair:
        t = self.target
        if t.kind is BoundaryKind.DIAGONAL_D:
            return diag_point(offset)
        if t.kind is BoundaryKind.EDGE_E1:
            return edge_point(offset, t.gamma)
        if t.kind is BoundaryKind.EDGE_E2:
            return edge_point(offset, t.gamma).swap()
        if t.kind is BoundaryKind.CORNER_HALF_ONE:
            return corner_half_one_point(offset, t.rho)
        return corner_half_half_point(offset, t.rho)

    def law(self) -> LimitLaw:
        t = self.target
        if t.kind is BoundaryKind.DIAGONAL_D:
            return LimitLaw(LawKind.BROWNIAN_MOTION)
        if t.kind in (BoundaryKind.EDGE_E1, BoundaryKind.EDGE_E2):
            return LimitLaw(LawKind.PRODUCT_FBM, gamma=t.gamma)
        if t.kind is BoundaryKind.CORNER_HALF_ONE:
            return LimitLaw(LawKind.CORNER_X, rho=t.rho)
        return LimitLaw(LawKind.CORNER_Y, rho=t.rho)


def _orders(spec: SweepSpec) -> list[int]:
    orders = [3, 4]
    if "k6" in spec.stats or spec.target.kind in (BoundaryKind.EDGE_E1, BoundaryKind.EDGE_E2):
        orders.append(6)
    return orders


def _rate(spec: SweepSpec, p: ExponentPair, kap: dict) -> float:
    kind = spec.target.kind
    if kind is BoundaryKind.DIAGONAL_D:
        return rate_diag(p)
    if kind is BoundaryKind.CORNER_HALF_ONE:
        return rate_corner(p)
    if kind in (BoundaryKind.EDGE_E1, BoundaryKind.EDGE_E2):
        return dw_bound_edge(kap[3], kap[4], kap[6])
    return math.nan


def _simulated(spec: SweepSpec, p: ExponentPair, law: LimitLaw, row: dict) -> None:
    cfg = spec.lattice
    ens = simulate_paths(p, 1.0, cfg)
    z = ens.at(1.0)
    st = k_statistics(z)
    for m in (3, 4, 6):
        if f"k{m}" in spec.stats:
            row[f"sim_k{m}"] = st.value(m)
            row[f"sim_k{m}_se"] = st.se(m)
    if "cf" in spec.stats:
        re, im, se = empirical_cf(z, 1.0)
        row.update(sim_cf_re=re, sim_cf_im=im, sim_cf_se=se)
    if "w1" in spec.stats:
        ref = sample_limit(law, [0.0, 1.0], z.size, cfg.seed + 1).at(1.0)
        row["sim_w1"] = wasserstein1(z, ref)


def _decaying(spec: SweepSpec) -> list[str]:
    kind = spec.target.kind
    if kind is BoundaryKind.DIAGONAL_D:
        return ["k3", "k4", "rate"]
    if kind in (BoundaryKind.EDGE_E1, BoundaryKind.EDGE_E2):
        return ["k3", "k4", "k6", "rate"]
    if kind is BoundaryKind.CORNER_HALF_ONE:
        return ["k3", "k4", "rate"]
    return ["k3", "k4"]


def run_sweep(spec: SweepSpec) -> list[dict]:
    """One row per offset followed by one slope row per vanishing quantity."""
    combo = LinearCombo.unit()
    law = spec.law()
    rows = []
    for off in spec.offsets:
        p = spec.point(off)
        row = {"row": "point", "offset": off, "gamma1": p.gamma1, "gamma2": p.gamma2}
        kap = {}
        for m in _orders(spec):
            res = kappa_m(p, combo, m, spec.budget, spec.seed, jobs=spec.jobs)
            kap[m] = res.value
            lim = kappa_limit(law, m, combo)
            row[f"k{m}"] = res.value
            row[f"k{m}_se"] = res.std_error
            row[f"limit_k{m}"] = lim
            row[f"gap_k{m}"] = abs(res.value - lim)
        row["rate"] = _rate(spec, p, kap)
        if spec.lattice is not None:
            _simulated(spec, p, law, row)
        rows.append(row)

    slopes = []
    for name in _decaying(spec):
        key = "rate" if name == "rate" else f"gap_{name}"
        ys = [r[key] for r in rows]
        slope, se = math.nan, math.nan
        if len(ys) >= 3 and all(np.isfinite(ys)) and min(ys) > 0:
            slope, se = loglog_slope(spec.offsets, ys)
        slopes.append({"row": "slope", "quantity": name, "slope": slope, "slope_se": se})
    return rows + slopes


def no_l2_pairs(kind: str, r: float, h: float, gamma: float = -0.7):
    """Two points approaching the same boundary feature at offset ratio r."""
    if kind == "edge":
        return ExponentPair(-0.5 - r * h, gamma), ExponentPair(-0.5 - h, gamma)
    if kind == "corner":
        return ExponentPair(-0.5 - r * h * h, -1.0 + r * h), ExponentPair(-0.5 - h * h, -1.0 + h)
    raise RangeError(f"no-L2 study supports 'edge' or 'corner', got {kind!r}")


def no_l2_table(kind: str, r_list: Sequence[float], h: float, gamma: float = -0.7) -> list[dict]:
    """Cross-covariance of two nearby boundary approaches against 2 sqrt(r) / (1 + r)."""
    if not 0 < h < 0.25:
        raise DomainError("h must lie in (0, 1/4)")
    rows = []
    for r in r_list:
        if not 0 < r <= 1:
            raise DomainError(f"r must lie in (0, 1], got {r}")
        a, g = no_l2_pairs(kind, r, h, gamma)
        limit = 2 * math.sqrt(r) / (1 + r)
        cov = cross_covariance(a, g)
        rows.append({"r": r, "cross_cov": cov, "limit": limit, "below_one": limit < 1})
    return rows
