import numpy as np
import pytest

from plasmavac import linalg, plasma
from plasmavac.errors import GridError, InadmissibleStateError, JacobianDegenerateError
from plasmavac.geometry import FrontDerivs
from plasmavac.plasma import EquationOfState, PlasmaState
from plasmavac.suites import sample_derivs, sample_plasma


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def test_matrices_symmetric_and_A0_positive(rng):
    for _ in range(50):
        U = sample_plasma(rng)
        A = plasma.assemble_plasma_matrices(U)
        for m in A:
            assert linalg.is_symmetric(m)
        assert linalg.sym_eigvals(A[0])[0] > 0


def test_eos_and_inadmissible_states():
    rho, rho_p, p = plasma.eos_eval(1.5, [0, 1, 0], 0.0)
    assert p == pytest.approx(1.0)
    assert rho == pytest.approx(1.0)
    assert rho_p == pytest.approx(0.6)
    with pytest.raises(InadmissibleStateError):
        PlasmaState(0.5, np.zeros(3), [0, 1, 0])
    with pytest.raises(ValueError):
        EquationOfState(gamma_ad=1.0)


def test_flat_static_boundary_matrix_is_E12():
    U = PlasmaState(1.5, np.zeros(3), [0.0, 1.0, 0.0])
    A1 = plasma.assemble_Atilde1(U, FrontDerivs(0.0, 0.0, 0.0, 0.0))
    assert np.array_equal(A1, plasma.e_matrix(1))
    assert linalg.signature_count(-A1) == (1, 6, 1)


def test_secondary_congruence_matches_closed_form(rng):
    for _ in range(50):
        U = sample_plasma(rng)
        d = sample_derivs(rng, 0.5)
        sec = plasma.assemble_secondary_plasma(U, d)
        for a, b in zip(sec.A, plasma.secondary_closed_form(U, d)):
            assert np.allclose(a, b, atol=1e-10 * max(1.0, np.abs(b).max()))
        # total d_j coefficient stays symmetric
        for j in range(4):
            assert linalg.asymmetry(sec.A[j] + sec.E[j]) < 1e-10


def test_jacobian_gate():
    U = PlasmaState(1.5, np.zeros(3), [0.0, 1.0, 0.0])
    with pytest.raises(JacobianDegenerateError):
        plasma.assemble_Atilde1(U, FrontDerivs(0.0, -0.6, 0.0, 0.0))


def test_zero_order_C_matches_finite_differences(rng):
    for _ in range(10):
        U = sample_plasma(rng)
        d = sample_derivs(rng, 0.5)
        dU = rng.normal(size=(4, 8))
        C = plasma.zero_order_C(U, dU, d)
        assert np.allclose(C, plasma.zero_order_C_fd(U, dU, d), atol=1e-6 * max(1.0, np.abs(C).max()))


def test_zero_order_C_vanishes_for_constant_state():
    U = PlasmaState(1.5, np.zeros(3), [0.0, 1.0, 0.0])
    assert not np.any(plasma.zero_order_C(U, np.zeros((4, 8)), FrontDerivs(0, 0, 0, 0)))


def test_good_unknown():
    W = np.arange(6.0)
    out = plasma.good_unknown(W, 0.5, 0.0, np.ones(6))
    assert np.allclose(out, W - 0.5)
    with pytest.raises(GridError):
        plasma.good_unknown(np.zeros((6, 4)), np.zeros(5), 0.0, 0.0)
    with pytest.raises(JacobianDegenerateError):
        plasma.good_unknown(W, 0.1, -0.7, np.ones(6))
