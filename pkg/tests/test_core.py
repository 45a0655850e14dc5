import math

import pytest

from rosenblatt_lab import (
    BoundaryKind,
    BoundaryTarget,
    DomainError,
    ExponentPair,
    LinearCombo,
    classify_boundary,
    cross_covariance,
    mu2_raw,
    mu3,
    normalization_A,
)

# A from the variance identity evaluated with mpmath's beta at 30 digits
A_REF = [
    ((-0.7, -0.7), 0.0479156107676867687),
    ((-0.7, -0.65), 0.0592271705895889182),
    ((-0.55, -0.9), 0.0184213441988286762),
    ((-0.501, -0.98), 0.000883442925287418815),
]


@pytest.mark.parametrize("g, expected", A_REF)
def test_normalization_constant(g, expected):
    assert normalization_A(ExponentPair(*g)) == pytest.approx(expected, rel=1e-13)


def test_standardized_variance_is_one():
    p = ExponentPair(-0.62, -0.81)
    assert mu2_raw(p, normalization_A(p)) == pytest.approx(1.0, rel=1e-14)


def test_mu3_is_symmetric_in_the_exponents():
    p = ExponentPair(-0.7, -0.65)
    assert mu3(p) == pytest.approx(mu3(p.swap()), rel=1e-13)
    assert mu3(p) == pytest.approx(1.6945645833712633, rel=1e-12)


def test_hurst_and_region():
    p = ExponentPair(-0.7, -0.65)
    assert p.hurst() == pytest.approx(0.65)
    assert p.interior
    assert not ExponentPair(-0.3, -0.7).interior
    assert not ExponentPair(-0.9, -0.9).interior
    with pytest.raises(DomainError):
        mu3(ExponentPair(-0.9, -0.9))


def test_cross_covariance_is_a_correlation():
    a, g = ExponentPair(-0.6, -0.7), ExponentPair(-0.65, -0.75)
    assert cross_covariance(a, a) == pytest.approx(1.0, rel=1e-13)
    c = cross_covariance(a, g)
    assert 0 < c < 1
    assert cross_covariance(g, a) == pytest.approx(c, rel=1e-13)


def test_cross_covariance_swap_invariance():
    a, g = ExponentPair(-0.6, -0.7), ExponentPair(-0.65, -0.75)
    assert cross_covariance(a.swap(), g.swap()) == pytest.approx(cross_covariance(a, g), rel=1e-13)


@pytest.mark.parametrize(
    "g, kind",
    [
        ((-0.52, -0.75), BoundaryKind.EDGE_E1),
        ((-0.75, -0.52), BoundaryKind.EDGE_E2),
        ((-0.74, -0.74), BoundaryKind.DIAGONAL_D),
        ((-0.51, -0.97), BoundaryKind.CORNER_HALF_ONE),
        ((-0.97, -0.51), BoundaryKind.CORNER_HALF_ONE),
        ((-0.51, -0.52), BoundaryKind.CORNER_HALF_HALF),
    ],
)
def test_classify_boundary(g, kind):
    target, dist = classify_boundary(ExponentPair(*g))
    assert target.kind is kind
    assert dist > 0


def test_corner_ratios():
    info = classify_boundary(ExponentPair(-0.505, -0.99))
    assert info.target.rho == pytest.approx((-1.495 + 1.5) / 0.01)
    info = classify_boundary(ExponentPair(-0.501, -0.53))
    assert info.target.rho == pytest.approx(0.001 / 0.03)


def test_boundary_target_validation():
    with pytest.raises(DomainError):
        BoundaryTarget(BoundaryKind.EDGE_E1)
    with pytest.raises(DomainError):
        BoundaryTarget(BoundaryKind.CORNER_HALF_HALF, rho=1.5)


def test_linear_combo_parse_round_trip():
    c = LinearCombo.parse("1:1, -0.5:0.25")
    assert c.entries == ((1.0, 1.0), (-0.5, 0.25))
    assert LinearCombo.parse(str(c)) == c
    assert LinearCombo.parse("0.5").entries == ((1.0, 0.5),)
    with pytest.raises(DomainError):
        LinearCombo.parse("1:-1")
    with pytest.raises(DomainError):
        LinearCombo([])


def test_no_l2_limit_below_one():
    h = 1e-3
    for r in (0.25, 0.5):
        c = cross_covariance(ExponentPair(-0.5 - r * h, -0.7), ExponentPair(-0.5 - h, -0.7))
        assert c == pytest.approx(2 * math.sqrt(r) / (1 + r), abs=1e-3)
        assert c < 1
