import math

import numpy as np
import pytest

from plasmavac import geometry
from plasmavac.errors import GridError, InvertibilityError, JacobianDegenerateError
from plasmavac.geometry import FrontDerivs


def test_gate_errors_are_distinct():
    with pytest.raises(JacobianDegenerateError):
        geometry.jacobians_at(FrontDerivs(0.0, -0.6, 0.0, 0.0), 0.5)
    with pytest.raises(InvertibilityError):
        geometry.jacobians_at(FrontDerivs(2.0, 0.0, 0.0, 0.0), 0.5)
    assert not issubclass(JacobianDegenerateError, InvertibilityError)
    assert not issubclass(InvertibilityError, JacobianDegenerateError)


def test_jacobian_pack_consistency():
    d = FrontDerivs(0.4, 0.2, -0.3, 0.5)
    pack = geometry.jacobians_at(d, 0.6, debug=True)
    assert pack.detJ == pytest.approx(1.2**2 * (1 - 0.24**2) ** 2)
    assert np.allclose(pack.N, [1.0, 0.3, -0.5])


def test_chi_profile():
    s = np.linspace(-3, 3, 601)
    c = geometry.chi(s)
    assert np.all(c[np.abs(s) <= 1] == 1.0)
    assert np.all(c[np.abs(s) >= 2] == 0.0)
    assert np.all((c >= 0) & (c <= 1))
    fd = np.gradient(c, s)
    assert np.max(np.abs(fd - geometry.chi_prime(s))) < 1e-3


def _front(n=32):
    x = np.arange(n) * 2 * math.pi / n
    X2, X3 = np.meshgrid(x, x, indexing="ij")
    return 0.05 * np.cos(X2) + 0.03 * np.sin(2 * X3) + 0.02 * np.cos(X2 + X3)


def test_lift_trace_and_bounds():
    x1 = np.linspace(-1, 1, 41)
    rep = geometry.verify_lift_estimates(_front(), x1)
    assert rep["trace_error"] < 1e-12
    assert rep["slope_bound_applies"]
    assert rep["sup_abs_psi_1"] <= 0.5
    assert rep["pass"]


def test_lift_decays_away_from_front():
    x1 = np.array([0.0, 3.0])
    lift = geometry.lift_front(_front(), x1)
    assert np.max(np.abs(lift.psi[1])) < 1e-14


def test_lift_rejects_bad_grids():
    with pytest.raises(GridError):
        geometry.lift_front(np.zeros((12, 16)), np.zeros(3))
    bad = np.zeros((16, 16))
    bad[0, 0] = np.nan
    with pytest.raises(GridError):
        geometry.lift_front(bad, np.zeros(3))


def test_transform_routes_converge_on_small_grids():
    res = geometry.transform_convergence(ns=(32, 64))
    for key in ("maxwell", "tilde", "secsym"):
        assert res["orders"][key] > 1.7
