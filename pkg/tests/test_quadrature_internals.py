import numpy as np
import pytest
from scipy import integrate

from rosenblatt_lab import _faces, _spectral


def brute_envelope(taus, y, beta):
    def g(r):
        return r**beta * max(0.0, min(t - r * v for t, v in zip(taus, y)))

    top = min(t / v for t, v in zip(taus, y) if v > 0)
    kinks = sorted({(taus[k] - taus[l]) / (y[k] - y[l]) for k in range(len(y)) for l in range(k) if y[k] != y[l]})
    pts = [k for k in kinks if 0 < k < top]
    return integrate.quad(g, 0, top, points=pts or None, limit=200, epsabs=1e-13)[0]


@pytest.mark.parametrize("beta", [-0.5, 0.3, 2.0])
def test_lower_envelope_integral(beta):
    taus = np.array([0.5, 1.0, 0.8])
    ys = np.array([[0.3, 1.0, 0.0], [1.0, 0.2, 0.6], [0.0, 0.0, 1.0]])
    got = _faces._lower_envelope_integral(taus, ys, beta)
    for row, value in zip(ys, got):
        assert value == pytest.approx(brute_envelope(taus, row, beta), rel=1e-9)


def test_unit_box_factor():
    beta = 1.7
    got = _faces._lower_envelope_integral(np.array([1.0]), np.array([[1.0]]), beta)
    assert got[0] == pytest.approx(1 / ((beta + 1) * (beta + 2)))


def test_cells_are_aligned_with_times():
    edges = _spectral.cell_edges((1.0, 0.25), 16)
    assert 0.25 in edges and edges[0] == 0.0 and edges[-1] == 1.0
    assert np.all(np.diff(edges) > 0)


def test_gram_matrix_is_symmetric_positive():
    edges = _spectral.cell_edges((1.0,), 32)
    G = _spectral.gram_matrix((-0.7, -0.65), edges)
    assert np.allclose(G, G.T, rtol=1e-12, atol=0)
    assert np.linalg.eigvalsh(G).min() > -1e-12 * np.abs(G).max()


def test_default_cells():
    assert _spectral.default_cells(2_000_000) == 848
    assert _spectral.default_cells(10_000) == 128
    assert _spectral.default_cells(10**9) == 1200
