import math

import numpy as np
import pytest

from plasmavac import boundary
from plasmavac.boundary import HatBoundary
from plasmavac.errors import BoundaryConditionError, InvertibilityError, StabilityError
from plasmavac.suites import sample_hat


@pytest.mark.parametrize("phi_t, incoming", [(-0.5, 2), (0.5, 4)])
def test_incoming_counts(phi_t, incoming):
    rep = boundary.btilde1_spectrum(phi_t, 0.2, -0.1, 0.5)
    assert rep.incoming == incoming
    assert rep.max_abs_diff <= 1e-10
    assert not rep.degenerate


def test_degenerate_and_refused():
    rep = boundary.btilde1_spectrum(0.0, 0.3, 0.0, 0.5)
    assert rep.degenerate
    assert rep.incoming == 2
    with pytest.raises(InvertibilityError):
        boundary.btilde1_spectrum(2.5, 0.0, 0.0, 0.5)


def test_closed_form_values():
    ev = boundary.btilde1_closed_form(0.4, 0.0, 0.0, 0.5)
    assert ev == pytest.approx([-1.2, -1.2, -0.2, -0.2, 0.8, 0.8])
    assert boundary.explicit_matches_assembled(0.3, 0.2, -0.4, 0.7) < 1e-12


def test_characteristic_counts():
    ws = boundary.ws_system_characteristics()
    assert ws["total_boundary_conditions"] == 4


def test_quadratic_form_routes_agree():
    rng = np.random.default_rng(3)
    for _ in range(50):
        hat = sample_hat(rng)
        gamma = float(rng.uniform(1, 5))
        tr = boundary.manufacture_trace(hat, gamma, 0.4, rng.normal(size=7))
        res = boundary.boundary_residuals(tr, hat, gamma, 0.4)
        assert max(abs(v) for v in res.values()) < 1e-10
        direct, decomposed, terms = boundary.quadratic_form_A(tr, hat, gamma, 0.4)
        assert direct == pytest.approx(decomposed, rel=1e-9, abs=1e-10)


def test_quadratic_form_rejects_bad_trace():
    hat = HatBoundary(H=np.array([0, 1.0, 0]), calH=np.array([0, 0, 1.0]))
    tr = boundary.manufacture_trace(hat, 2.0, 0.5, [0.1, 0.2, 0.3, -0.1, 0.4, 0.5, 0.2])
    tr.q += 1.0
    with pytest.raises(BoundaryConditionError, match="pressure"):
        boundary.quadratic_form_A(tr, hat, 2.0, 0.5)
    boundary.quadratic_form_A(tr, hat, 2.0, 0.5, check=False)


def test_front_gradient_recovery():
    rng = np.random.default_rng(8)
    for _ in range(30):
        hat = sample_hat(rng)
        free = rng.normal(size=7)
        tr = boundary.manufacture_trace(hat, 3.0, 0.5, free)
        g = boundary.resolve_front_gradient(tr, hat, 3.0, 0.5)
        assert [g.phi_t, g.phi_2, g.phi_3] == pytest.approx(list(free[1:4]), rel=1e-8, abs=1e-9)


def test_stability_gate():
    hat = HatBoundary(H=np.array([0, 0, 1.0]), calH=np.array([0, 0, 2.0]))
    with pytest.raises(StabilityError, match="delta"):
        boundary.check_stability(hat)
    ok = HatBoundary(H=np.array([0, 1.0, 0]), calH=np.array([0, 0, math.sqrt(3)]))
    assert boundary.check_stability(ok) == pytest.approx(math.sqrt(3))
