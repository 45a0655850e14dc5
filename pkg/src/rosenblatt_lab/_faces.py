"""Randomized quasi-Monte Carlo for circular integrals via a face reduction.

A circular integral over a product of boxes is split according to which
node is the lowest (``a``) and which is the highest (``b``).  Writing
``s = u + rho * y`` with ``y[a] = 0`` and ``y[b] = 1``, the homogeneous
kernel factors out of ``rho`` and the integrals over ``u`` and ``rho`` are
done in closed form.  What is left on each face is an integral over the
``m - 2`` free coordinates of ``y``, which are sampled node by node along
the two arcs of the cycle from a defensive mixture of power laws centred
on already placed neighbours.  Distances to the sampling anchor are kept
as logarithms so that very strong singularities do not underflow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp
from scipy.stats import qmc

REPLICATES = 32
_BATCH = 1 << 15
_TINY = 1e-300


@dataclass(frozen=True)
class Chain:
    """Matrix-valued kernel around a cycle of ``m`` nodes.

    Link ``j`` joins node ``j-1`` to node ``j`` and contributes
    ``pos[j] * d**expo[j]`` when ``d = s_j - s_{j-1} > 0`` and
    ``neg[j] * |d|**expo[j]`` otherwise (elementwise on D x D arrays).
    The integrand is the trace of the ordered product of link matrices,
    times ``prod_j w_j(s_j)`` with ``w_j = sum c * 1{0 <= s < tau}``.
    ``degree`` is the total homogeneity degree of every trace term.
    """

    pos: np.ndarray
    neg: np.ndarray
    expo: np.ndarray
    node_terms: tuple
    degree: float

    @property
    def m(self) -> int:
        return self.expo.shape[0]

    @property
    def beta(self) -> float:
        return self.m - 2 + self.degree

    def rotation_invariant(self) -> bool:
        same_links = all(
            np.array_equal(x[0], x[j]) for x in (self.pos, self.neg, self.expo) for j in range(self.m)
        )
        return same_links and len(set(self.node_terms)) == 1

    def faces(self) -> list[tuple[int, int, int]]:
        """(a, b, multiplicity) for the faces that need integrating."""
        m = self.m
        if self.rotation_invariant():
            return [(0, b, m) for b in range(1, m)]
        return [(a, b, 1) for a in range(m) for b in range(m) if a != b]


def _arcs(m: int, a: int, b: int):
    for start, end in ((a, b), (b, a)):
        nodes = []
        j = (start + 1) % m
        while j != end:
            nodes.append(j)
            j = (j + 1) % m
        yield start, end, nodes


def _proposal_exponent(expo: np.ndarray) -> float:
    e = float(np.min(expo))
    return min(e, 0.0)


def _power_log_mass(x0: np.ndarray, e: float) -> np.ndarray:
    # log of x0^(e+1) + (1-x0)^(e+1)
    p = e + 1.0
    with np.errstate(divide="ignore"):
        return np.logaddexp(p * np.log(x0), p * np.log1p(-x0))


class _Sample:
    """Positions of a batch of face points plus exact anchor distances."""

    def __init__(self, n: int, m: int, a: int, b: int):
        self.pos = np.zeros((n, m))
        self.pos[:, b] = 1.0
        self.anchor = np.full((n, m), -1, dtype=np.int64)
        self.logr = np.zeros((n, m))
        self.sign = np.ones((n, m))

    def log_dist(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
        """log|y_j - y_i| and sign(y_j - y_i)."""
        diff = self.pos[:, j] - self.pos[:, i]
        logd = np.log(np.maximum(np.abs(diff), _TINY))
        sgn = np.where(diff >= 0, 1.0, -1.0)
        from_i = self.anchor[:, j] == i
        from_j = self.anchor[:, i] == j
        logd = np.where(from_i, self.logr[:, j], np.where(from_j, self.logr[:, i], logd))
        sgn = np.where(from_i, self.sign[:, j], np.where(from_j, -self.sign[:, i], sgn))
        return logd, sgn


def _place_points(chain: Chain, a: int, b: int, u: np.ndarray) -> tuple[_Sample, np.ndarray]:
    """Map uniforms to face points; returns the sample and log proposal density."""
    n = u.shape[0]
    m = chain.m
    smp = _Sample(n, m, a, b)
    logq = np.zeros(n)
    col = 0
    for start, end, nodes in _arcs(m, a, b):
        prev = start
        for k, j in enumerate(nodes):
            anchors = [(prev, _proposal_exponent(chain.expo[j]))]
            if k == len(nodes) - 1:
                anchors.append((end, _proposal_exponent(chain.expo[end])))
            n_comp = len(anchors) + 1
            uu = u[:, col]
            col += 1
            comp = np.minimum((uu * n_comp).astype(np.int64), n_comp - 1)
            v = np.clip(uu * n_comp - comp, _TINY, 1.0)

            y = v.copy()
            for ci, (anc, e) in enumerate(anchors):
                sel = comp == ci
                if not sel.any():
                    continue
                x0 = smp.pos[sel, anc]
                p = e + 1.0
                with np.errstate(divide="ignore"):
                    log_ml = np.where(x0 > 0, p * np.log(x0), -np.inf)
                log_total = _power_log_mass(x0, e)
                logw = np.log(v[sel]) + log_total
                left = logw < log_ml
                # right branch: r^p = w - x0^p
                with np.errstate(divide="ignore", invalid="ignore"):
                    log_right = logw + np.log1p(-np.exp(np.minimum(log_ml - logw, 0.0)))
                log_base = np.where(left, logw, log_right)
                log_base = np.maximum(log_base, math.log(_TINY))
                lr = log_base / p
                r = np.exp(lr)
                ys = np.clip(np.where(left, x0 - r, x0 + r), 0.0, 1.0)
                y[sel] = ys
                idx = np.flatnonzero(sel)
                smp.anchor[idx, j] = anc
                smp.logr[idx, j] = lr
                smp.sign[idx, j] = np.where(left, -1.0, 1.0)
            smp.pos[:, j] = y

            terms = [np.zeros(n)]
            for anc, e in anchors:
                logd, _ = smp.log_dist(anc, j)
                p = e + 1.0
                terms.append(math.log(p) + e * logd - _power_log_mass(smp.pos[:, anc], e))
            logq += logsumexp(np.stack(terms), axis=0) - math.log(n_comp)
            prev = j
    return smp, logq


def _trace_weight(chain: Chain, smp: _Sample) -> tuple[np.ndarray, np.ndarray]:
    """Trace of the link product as (mantissa, log scale)."""
    m = chain.m
    n = smp.pos.shape[0]
    log_scale = np.zeros(n)
    prod = None
    for j in range(m):
        logd, sgn = smp.log_dist((j - 1) % m, j)
        coef = np.where(sgn[:, None, None] > 0, chain.pos[j][None], chain.neg[j][None])
        logmag = chain.expo[j][None] * logd[:, None, None]
        top = logmag.max(axis=(1, 2))
        mat = coef * np.exp(logmag - top[:, None, None])
        log_scale += top
        prod = mat if prod is None else np.matmul(mat, prod)
    return np.trace(prod, axis1=1, axis2=2), log_scale


def _lower_envelope_integral(taus: np.ndarray, ys: np.ndarray, beta: float) -> np.ndarray:
    """Integral over rho > 0 of rho^beta * max(0, min_k(tau_k - rho * y_k)).

    ``taus`` has shape (L,), ``ys`` shape (n, L); some line has y > 0.
    """
    n, n_lines = ys.shape
    with np.errstate(divide="ignore", invalid="ignore"):
        zeros = np.where(ys > 0, taus[None, :] / ys, np.inf)
    rho_max = zeros.min(axis=1)
    cands = [np.zeros(n), rho_max]
    cands += [np.minimum(zeros[:, k], rho_max) for k in range(n_lines)]
    for k, l in itertools.combinations(range(n_lines), 2):
        dy = ys[:, k] - ys[:, l]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(dy != 0, (taus[k] - taus[l]) / dy, 0.0)
        cands.append(np.clip(r, 0.0, rho_max))
    rho = np.sort(np.stack(cands, axis=1), axis=1)
    g = np.maximum(np.min(taus[None, None, :] - rho[:, :, None] * ys[:, None, :], axis=2), 0.0)
    r0, r1 = rho[:, :-1], rho[:, 1:]
    g0, g1 = g[:, :-1], g[:, 1:]
    width = r1 - r0
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(width > 0, (g1 - g0) / width, 0.0)
    icpt = g0 - slope * r0
    p1, p2 = beta + 1.0, beta + 2.0
    seg = icpt * (r1**p1 - r0**p1) / p1 + slope * (r1**p2 - r0**p2) / p2
    return np.where(width > 0, seg, 0.0).sum(axis=1)


def _box_factor(chain: Chain, pos: np.ndarray) -> np.ndarray | float:
    beta = chain.beta
    terms = chain.node_terms
    if len(set(terms)) == 1 and len(terms[0]) == 1:
        c, tau = terms[0][0]
        return c ** chain.m * tau ** (beta + 2) / ((beta + 1) * (beta + 2))
    grouped: dict[tuple, float] = {}
    for choice in itertools.product(*terms):
        key = tuple(tau for _, tau in choice)
        grouped[key] = grouped.get(key, 0.0) + math.prod(c for c, _ in choice)
    total = np.zeros(pos.shape[0])
    for key, coeff in grouped.items():
        if coeff == 0.0:
            continue
        levels = sorted(set(key))
        taus = np.array(levels)
        ys = np.stack(
            [pos[:, [j for j, t in enumerate(key) if t == lv]].max(axis=1) for lv in levels], axis=1
        )
        if taus.min() <= 0:
            continue
        total += coeff * _lower_envelope_integral(taus, ys, beta)
    return total


def face_values(chain: Chain, a: int, b: int, u: np.ndarray) -> np.ndarray:
    """Integrand values of face (a, b) at uniform points ``u`` (n, m-2)."""
    smp, logq = _place_points(chain, a, b, u)
    tr, log_scale = _trace_weight(chain, smp)
    box = _box_factor(chain, smp.pos)
    return tr * np.exp(log_scale - logq) * box


@dataclass(frozen=True)
class FaceTask:
    chain: Chain
    a: int
    b: int
    weight: int
    log2_points: int
    seed: int
    cell: int


def run_face(task: FaceTask) -> np.ndarray:
    """Replicate means of one face under independent Sobol scramblings."""
    chain = task.chain
    dim = chain.m - 2
    if dim == 0:
        val = face_values(chain, task.a, task.b, np.zeros((1, 0)))[0]
        return np.full(REPLICATES, task.weight * val)
    ss = np.random.SeedSequence(task.seed, spawn_key=(task.cell,))
    means = np.empty(REPLICATES)
    for rep, child in enumerate(ss.spawn(REPLICATES)):
        sob = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng(child))
        pts = sob.random_base2(task.log2_points)
        acc = 0.0
        for lo in range(0, pts.shape[0], _BATCH):
            acc += face_values(chain, task.a, task.b, pts[lo : lo + _BATCH]).sum()
        means[rep] = task.weight * acc / pts.shape[0]
    return means


def integrate(chain: Chain, budget: int, seed: int, jobs: int = 1):
    """Sum over faces; returns (value, std_error, n_points)."""
    from .parallel import parallel_map

    faces = chain.faces()
    per_face = max(budget // len(faces), REPLICATES)
    log2_points = max(int(math.floor(math.log2(per_face / REPLICATES))), 0)
    tasks = [
        FaceTask(chain, a, b, w, log2_points, seed, cell) for cell, (a, b, w) in enumerate(faces)
    ]
    reps = np.sum(parallel_map(run_face, tasks, jobs), axis=0)
    if chain.m == 2:
        # closed form; report a rounding-level error instead of zero
        v = float(reps[0])
        return v, 64 * np.finfo(float).eps * abs(v), 1
    value = float(reps.mean())
    se = float(reps.std(ddof=1) / math.sqrt(REPLICATES))
    return value, se, len(faces) * REPLICATES * (1 << log2_points)
