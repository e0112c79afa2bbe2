import math

import numpy as np
import pytest

from plasmavac import norms
from plasmavac.errors import GridError


def _grid(nt=11, n1=21, n2=64):
    x2 = np.arange(n2) * 2 * math.pi / n2
    return norms.Grid3(np.linspace(0, 1, nt), np.linspace(0, 1, n1), x2)


def test_constant_field():
    g = _grid()
    u = np.full(g.shape, 2.0)
    assert norms.L2_norm(u, g) == pytest.approx(8 * math.pi)
    assert norms.H1_gamma_norm(u, 3.0, g) == pytest.approx(9 * 8 * math.pi)
    assert norms.conormal_H1_norm(u, 3.0, g) == pytest.approx(9 * 8 * math.pi)


def test_tangential_wave():
    g = _grid(n2=256)
    u = np.broadcast_to(np.sin(g.x2), g.shape)
    assert norms.L2_norm(u, g) == pytest.approx(math.pi)
    assert norms.H1_gamma_norm(u, 2.0, g) == pytest.approx(5 * math.pi, rel=1e-3)


def test_conormal_is_weaker_near_wall():
    g = _grid(n1=101)
    u = np.broadcast_to(g.x1[:, None], g.shape)
    assert norms.conormal_H1_norm(u, 1.0, g) < norms.H1_gamma_norm(u, 1.0, g)


def test_norms_grow_with_gamma():
    g = _grid()
    u = np.random.default_rng(0).normal(size=g.shape)
    vals = [norms.H1_gamma_norm(u, gm, g) for gm in (1, 2, 4)]
    assert vals == sorted(vals)


def test_gamma_below_one_rejected():
    g = _grid()
    with pytest.raises(ValueError):
        norms.H1_gamma_norm(np.zeros(g.shape), 0.5, g)
    with pytest.raises(ValueError):
        norms.trace_Hhalf_gamma(np.zeros((4, 8)), 0.9, np.arange(4.0), np.arange(8.0))


def test_grid_errors():
    with pytest.raises(GridError):
        norms.Grid3(np.array([0.0, 0.1, 0.5]), np.linspace(0, 1, 3), np.arange(4.0))
    g = _grid()
    with pytest.raises(GridError):
        norms.L2_norm(np.zeros((3, 3)), g)
    with pytest.raises(GridError):
        norms.L2_norm(np.zeros((2, 2, 2)), g)
    with pytest.raises(GridError):
        norms.trace_Hhalf_gamma(np.zeros((4, 8)), 1.0, np.arange(5.0), np.arange(8.0))


def test_taper():
    w = norms.tukey_right(11, 0.2)
    assert np.all(w[:8] == 1.0)
    assert w[-1] == pytest.approx(0.0)
    assert np.all(np.diff(w) <= 0)
    assert np.all(norms.tukey_right(5, 0.0) == 1.0)
    assert norms.taper_metadata()["alpha"] == norms.DEFAULT_TAPER


def test_sigma_profile():
    x = np.linspace(0, 2, 2001)
    s = norms.sigma(x)
    assert np.allclose(s[x <= 0.5], x[x <= 0.5])
    assert np.allclose(s[x >= 1.0], 1.0)
    assert np.all(np.diff(s) >= -1e-15)
    ds = norms.sigma_prime(x)
    assert np.max(np.abs(np.gradient(s, x) - ds)) < 1e-3
    # C^2: second derivative vanishes from both sides at the junctions
    h = 1e-6
    for x0 in (0.5, 1.0):
        right = (norms.sigma_prime(x0 + h) - norms.sigma_prime(x0)) / h
        left = (norms.sigma_prime(x0) - norms.sigma_prime(x0 - h)) / h
        assert abs(right) < 1e-3 and abs(left) < 1e-3


def test_fourier_and_derivative_routes_agree():
    n = 64
    x = np.arange(n) * 2 * math.pi / n
    X, Y = np.meshgrid(x, x, indexing="ij")
    z = np.cos(2 * X) + 0.5 * np.sin(Y)
    L = (2 * math.pi, 2 * math.pi)
    a = norms.fourier_H1_gamma(z, 2.0, L)
    b = norms.periodic_derivative_H1_gamma(z, 2.0, L)
    assert a == pytest.approx(b, rel=1e-2)


def test_trace_norm_of_zero():
    assert norms.trace_Hhalf_gamma(np.zeros((8, 16)), 2.0, np.arange(8.0), np.arange(16.0)) == 0.0


def test_csv_writer(tmp_path):
    p = tmp_path / "n.csv"
    norms.write_norm_csv(p, [(1.0, "L2", 0.5), (2.0, "H1", 0.25)])
    lines = p.read_text().splitlines()
    assert lines[0] == "gamma,norm_name,value"
    assert lines[1] == "1.0,L2,0.5"
