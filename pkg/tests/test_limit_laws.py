import math

import numpy as np
import pytest

from rosenblatt_lab import (
    DomainError,
    ExponentPair,
    LawKind,
    LimitLaw,
    LinearCombo,
    RangeError,
    cf_product_normal,
    dw_bound_edge,
    k_statistics,
    kappa_limit,
    kappa_limit_cornerX,
    kappa_limit_cornerY,
    kappa_limit_edge,
    m_statistic,
    rate_corner,
    rate_diag,
    sample_fbm,
    sample_limit,
)
from rosenblatt_lab.limit_laws import fbm_covariance

UNIT = LinearCombo.unit()


def test_product_normal_cumulants():
    assert kappa_limit_edge(4, UNIT, -0.7) == 6
    assert kappa_limit_edge(6, UNIT, -0.7) == 120
    assert kappa_limit_edge(3, UNIT, -0.7) == 0
    assert kappa_limit_edge(2, LinearCombo.unit(0.5), -0.7) == pytest.approx(0.5 ** 1.6)


def test_corner_x_cumulants():
    assert kappa_limit_cornerX(4, UNIT, 1.0) == 6
    assert kappa_limit_cornerX(4, UNIT, 0.25) == pytest.approx(6 / 16)
    assert kappa_limit_cornerX(2, UNIT, 0.3) == 1
    assert kappa_limit_cornerX(5, UNIT, 0.3) == 0


def test_corner_y_cumulants():
    # rho = 1 is the standardized chi-square with one degree of freedom
    for m in range(2, 7):
        assert kappa_limit_cornerY(m, UNIT, 1.0) == pytest.approx(2 ** (m / 2 - 1) * math.factorial(m - 1))
    assert kappa_limit_cornerY(4, UNIT, 0.0) == 6
    assert kappa_limit_cornerY(3, UNIT, 0.0) == 0
    assert kappa_limit_cornerY(2, UNIT, 0.4) == pytest.approx(1.0)
    assert kappa_limit_cornerY(3, LinearCombo.unit(2.0), 1.0) == pytest.approx(8 * 2 ** 0.5 * 2)


def test_cornerY_continuous_at_zero():
    for m in (2, 3, 4):
        assert kappa_limit_cornerY(m, UNIT, 1e-12) == pytest.approx(kappa_limit_cornerY(m, UNIT, 0.0), abs=1e-4)


def test_dispatch_and_validation():
    assert kappa_limit(LimitLaw(LawKind.BROWNIAN_MOTION), 4, UNIT) == 0
    assert kappa_limit(LimitLaw(LawKind.BROWNIAN_MOTION), 2, LinearCombo.unit(0.5)) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        LimitLaw(LawKind.PRODUCT_FBM, gamma=-0.4)
    with pytest.raises(RangeError):
        LimitLaw(LawKind.CORNER_Y, rho=1.5)
    with pytest.raises(RangeError):
        kappa_limit_edge(1, UNIT, -0.7)


def test_cf_product_normal():
    assert cf_product_normal(1.0) == pytest.approx(1 / math.sqrt(2))
    assert cf_product_normal(0.0) == 1.0


def test_fbm_sampler_covariance():
    ens = sample_fbm(0.7, 64, 1.0, 40_000, seed=3)
    x, y = ens.at(0.5), ens.at(1.0)
    prod = x * y
    assert abs(prod.mean() - fbm_covariance(0.7, 0.5, 1.0)) <= 4 * prod.std() / math.sqrt(prod.size)


def test_non_uniform_grid_sampler():
    grid = [0.1, 0.3, 1.0]
    ens = sample_limit(LimitLaw(LawKind.BROWNIAN_MOTION), grid, 40_000, seed=5)
    v = ens.at(0.3)
    assert abs(v.var() - 0.3) <= 4 * 0.3 * math.sqrt(2 / v.size)


def test_sampler_is_seeded_and_checked():
    law = LimitLaw(LawKind.CORNER_X, rho=0.4)
    a = sample_limit(law, np.linspace(0, 1, 9), 600, seed=2)
    b = sample_limit(law, np.linspace(0, 1, 9), 600, seed=2)
    assert np.array_equal(a.paths, b.paths)
    with pytest.raises(DomainError):
        sample_limit(law, [0.5, 0.2], 10, seed=1)


def test_corner_y_sampler_cumulants():
    law = LimitLaw(LawKind.CORNER_Y, rho=0.3)
    st = k_statistics(sample_limit(law, [0.0, 1.0], 100_000, seed=8).at(1.0))
    for m in (2, 3, 4):
        assert abs(st.value(m) - kappa_limit(law, m, UNIT)) <= 4 * st.se(m)


def test_rates():
    p = ExponentPair(-0.74, -0.74)
    assert rate_diag(p) == pytest.approx(0.02**1.5)
    q = ExponentPair(-0.505, -0.99)
    V = 0.005**1.5 / 0.01
    assert rate_corner(q) == pytest.approx(V * (1 + math.sqrt(1 / 0.005 - 1 / 0.01)))
    assert dw_bound_edge(0.0, 6.0, 120.0) == pytest.approx(0.0, abs=1e-12)
    assert m_statistic(-0.3, 0.2) == 0.3
