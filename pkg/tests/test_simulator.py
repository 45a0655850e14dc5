import math
import warnings

import numpy as np
import pytest

from rosenblatt_lab import (
    DomainError,
    ExponentPair,
    LatticeConfig,
    NormalizationWarning,
    PathEnsemble,
    RangeError,
    gen_linear_pair,
    k_statistics,
    lattice_cumulants,
    power_tail_sum,
    simulate_paths,
)
from rosenblatt_lab.simulator import discrete_kernel, linear_coeffs

P = ExponentPair(-0.7, -0.65)


def quiet_simulate(p, horizon, cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NormalizationWarning)
        return simulate_paths(p, horizon, cfg)


def test_linear_coeffs_start_at_two():
    c = linear_coeffs(-0.75, 4)
    assert c == pytest.approx([2**-0.75, 3**-0.75, 4**-0.75, 5**-0.75])
    with pytest.raises(DomainError):
        linear_coeffs(-0.4, 4)


def test_discrete_kernel():
    assert discrete_kernel(0.5, 0.5, 8, -0.7) == 0.0
    assert discrete_kernel(1.0, 0.5, 10, -0.7) == pytest.approx(0.6**-0.7)


def test_discrete_kernel_sandwich():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        s, x = rng.random(2)
        N = int(rng.integers(1, 500))
        g = -rng.uniform(0.01, 0.99)
        v = discrete_kernel(s, x, N, g)
        lower = (s - x + 2 / N) ** g if s > x + 1 / N else 0.0
        upper = (s - x) ** g if s > x else 0.0
        assert lower <= v * (1 + 1e-12) and v <= upper * (1 + 1e-12)


def test_config_validation():
    with pytest.raises(RangeError):
        LatticeConfig(n_grid=100)
    with pytest.raises(RangeError):
        LatticeConfig(n_grid=256, trunc=1000)
    with pytest.raises(RangeError):
        LatticeConfig(record_per_unit=3)
    assert LatticeConfig().depth == 16 * 256


def test_single_step_cumulants_are_those_of_a_gaussian_product():
    # Y1 Y2 for jointly Gaussian (Y1, Y2): kappa_m = (m-1)!/2 [(c + s)^m + (c - s)^m]
    s = math.sqrt(power_tail_sum(-1.4, 2) * power_tail_sum(-1.3, 2))
    c = power_tail_sum(-1.35, 2)
    raw = lattice_cumulants(P, 1, (2, 3, 4))["raw"]
    for m in (2, 3, 4):
        expected = math.factorial(m - 1) / 2 * ((c + s) ** m + (c - s) ** m)
        assert raw[m] == pytest.approx(expected, rel=1e-10)


def test_linear_pair_second_moments():
    v = np.array([[np.mean(y1 * y1), np.mean(y1 * y2)] for y1, y2 in (gen_linear_pair(-0.75, -0.6, 8, 1, s) for s in range(100))])
    mean, se = v.mean(axis=0), v.std(axis=0, ddof=1) / 10
    expected = [power_tail_sum(-1.5, 2), power_tail_sum(-1.35, 2)]
    assert np.all(np.abs(mean - expected) <= 4 * se)


def test_linear_pair_is_seeded():
    a = gen_linear_pair(-0.75, -0.6, 32, 1, 5)
    b = gen_linear_pair(-0.75, -0.6, 32, 1, 5)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_simulated_cumulants_match_exact_lattice_values():
    cfg = LatticeConfig(n_paths=40_000, seed=4, record_per_unit=1)
    z = quiet_simulate(P, 1.0, cfg).at(1.0)
    st = k_statistics(z)
    exact = lattice_cumulants(P, 256, (3, 4))["standardized"]
    assert abs(st.k3 - exact[3]) <= 4 * st.se3
    assert abs(st.k4 - exact[4]) <= 4 * st.se4


def test_paths_shape_variance_and_meta():
    cfg = LatticeConfig(n_paths=600, seed=1, record_per_unit=16)
    ens = quiet_simulate(P, 2.0, cfg)
    assert ens.grid[0] == 0.0 and ens.grid[-1] == 2.0 and ens.grid.size == 33
    assert np.all(ens.at(0.0) == 0.0)
    assert np.var(ens.at(1.0), ddof=1) == pytest.approx(1.0)
    assert ens.meta["seed"] == 1 and ens.meta["rescale"] > 0


def test_short_horizon_is_scaled_by_self_similarity():
    cfg = LatticeConfig(n_paths=600, seed=1, record_per_unit=4)
    ens = quiet_simulate(P, 0.5, cfg)
    assert np.var(ens.at(0.5), ddof=1) == pytest.approx(0.5 ** (2 * P.hurst()))


def test_independent_of_jobs():
    a = quiet_simulate(P, 1.0, LatticeConfig(n_paths=700, seed=9, jobs=1, record_per_unit=8))
    b = quiet_simulate(P, 1.0, LatticeConfig(n_paths=700, seed=9, jobs=3, record_per_unit=8))
    assert np.array_equal(a.paths, b.paths)


def test_normalization_warning():
    with pytest.warns(NormalizationWarning):
        simulate_paths(P, 1.0, LatticeConfig(n_paths=300, seed=2, record_per_unit=1))


def test_bad_horizon():
    with pytest.raises(RangeError):
        simulate_paths(P, 0.3, LatticeConfig(n_paths=10))
    with pytest.raises(DomainError):
        simulate_paths(ExponentPair(-0.3, -0.7), 1.0, LatticeConfig(n_paths=10))


def test_csv_round_trip():
    ens = quiet_simulate(P, 1.0, LatticeConfig(n_paths=20, seed=3, record_per_unit=4))
    back = PathEnsemble.from_csv(ens.to_csv())
    assert np.array_equal(back.grid, ens.grid)
    assert np.array_equal(back.paths, ens.paths)
    assert back.meta["seed"] == 3
    assert PathEnsemble.from_csv(ens.to_csv(max_paths=5)).n_paths == 5
