import warnings

import pytest

from rosenblatt_lab import BoundaryKind, BoundaryTarget, DomainError, LatticeConfig, NormalizationWarning, RangeError
from rosenblatt_lab.studies import (
    SweepSpec,
    corner_half_half_point,
    corner_half_one_point,
    diag_point,
    no_l2_pairs,
    run_sweep,
)


def test_sweep_points():
    p = diag_point(0.02)
    assert p.gamma1 == p.gamma2 and p.gamma1 + p.gamma2 + 1.5 == pytest.approx(0.02)
    q = corner_half_one_point(0.01, 0.5)
    assert (q.gamma1 + q.gamma2 + 1.5) / (q.gamma2 + 1) == pytest.approx(0.5)
    r = corner_half_half_point(0.01, 0.5)
    assert (r.gamma1 + 0.5) / (r.gamma2 + 0.5) == pytest.approx(0.5)


def test_spec_validation():
    diag = BoundaryTarget(BoundaryKind.DIAGONAL_D)
    with pytest.raises(DomainError):
        SweepSpec(diag, [0.01, 0.02])
    with pytest.raises(DomainError):
        SweepSpec(diag, [0.7, 0.1])
    with pytest.raises(RangeError):
        SweepSpec(diag, [0.02, 0.01], ["k5"])


def test_corner_two_sweep_with_simulation():
    spec = SweepSpec(
        BoundaryTarget(BoundaryKind.CORNER_HALF_HALF, rho=1.0),
        [0.02, 0.01, 0.005],
        ["k3", "k4", "cf", "w1"],
        budget=200_000,
        lattice=LatticeConfig(n_paths=2000, seed=1, record_per_unit=1),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NormalizationWarning)
        rows = run_sweep(spec)
    pts = [r for r in rows if r["row"] == "point"]
    assert pts[-1]["limit_k3"] == pytest.approx(2**1.5)
    assert pts[-1]["gap_k3"] < pts[0]["gap_k3"]
    assert all("sim_w1" in r and "sim_cf_re" in r for r in pts)


def test_no_l2_pairs_kinds():
    with pytest.raises(RangeError):
        no_l2_pairs("diagonal", 0.5, 1e-3)
